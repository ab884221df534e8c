use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

use fraction_moments_cli::execute;

const MOTZKIN: &str = "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1";

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Self(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, body: &str) -> String {
        let p = self.0.path().join(name);
        fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn run(args: &[&str]) -> (i32, String, String) {
    execute(std::iter::once("fracmom").chain(args.iter().copied()))
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "structured"]);
    let (code, out, err) = run(&full);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}")))
}

#[test]
fn decide_moment_three_linear_fails() {
    let f = Files::new();
    let d = f.put("d.txt", "d=2\nz1\nz2\nz1 + z2 + 1 + i\n");
    let (code, r) = structured(&["decide-moment", &d]);
    assert_eq!(code, 2);
    assert_eq!(r["verdict"], "fails");
    assert_eq!(r["reason"], "two-variables-three-linear");
    let h = f.put("h.txt", "d=1\nz - 1\n");
    assert_eq!(structured(&["decide-moment", &h]).0, 0);
}

#[test]
fn motzkin_with_multiplier_writes_certificate() {
    let f = Files::new();
    let p = f.put("m.txt", MOTZKIN);
    let cert = f.path("m.cert");
    let (code, r) = structured(&["sos", &p, "--multiplier", "x^2+y^2", "--output", cert.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["multiplier_exponent"], 1);
    assert_eq!(r["residual"], "0");
    assert_eq!(fs::read_to_string(&cert).unwrap(), r["certificate"].as_str().unwrap());
    let (code, v) = structured(&["verify", cert.to_str().unwrap()]);
    assert_eq!((code, v["result"].as_str()), (0, Some("PASS")));
}

#[test]
fn tampered_certificate_fails_verification() {
    let f = Files::new();
    let p = f.put("m.txt", MOTZKIN);
    let cert = f.path("m.cert");
    assert_eq!(run(&["sos", &p, "--multiplier", "x^2+y^2", "--output", cert.to_str().unwrap()]).0, 0);
    let text = fs::read_to_string(&cert).unwrap();
    let tampered = text.replacen("square: 1;", "square: 2;", 1);
    assert_ne!(tampered, text);
    let bad = f.put("bad.cert", &tampered);
    let (code, r) = structured(&["verify", &bad]);
    assert_eq!(code, 2);
    assert_eq!(r["result"], "FAIL");
    assert_ne!(r["residual"], "0");
}

#[test]
fn unknown_and_refuted_have_distinct_codes() {
    let f = Files::new();
    let p = f.put("m.txt", MOTZKIN);
    let (code, r) = structured(&["sos", &p, "--multiplier", "x^2+y^2", "--m-max", "0"]);
    assert_eq!((code, r["result"].as_str()), (3, Some("exhausted")));
    let u = f.put("u.txt", "d=2\nz1\nz2\nz1 + z2 + 1\nz1 - z2 + i\n");
    assert_eq!(structured(&["decide-moment", &u]).0, 3);
    let neg = f.put("neg.txt", "x - 2");
    let (code, r) = structured(&["cylinder-sos", &neg]);
    assert_eq!((code, r["witness"].as_str()), (2, Some("(1, 0, 0)")));
    let t = f.put("t.txt", "t^2 - 1");
    assert_eq!(structured(&["sos", &t]).0, 2);
}

#[test]
fn input_errors_exit_one() {
    let f = Files::new();
    let p = f.put("bad.txt", "x^2 +* y");
    let (code, _, err) = run(&["sos", &p]);
    assert_eq!(code, 1);
    assert!(err.contains("column"), "{err}");
    let d = f.put("d.txt", "d=2\nz1\nz1 + q\n");
    let (code, _, err) = run(&["decide-moment", &d]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(run(&["sos", "/nonexistent/file"]).0, 1);
    let e = f.put("e.txt", "0 0 1 1\n");
    let (code, _, err) = run(&["semigroup-certify", &e, "--semigroup", "Z2"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn semigroup_commands() {
    let f = Files::new();
    let a = f.put("a.txt", "0 0 2\n1 0 1\n0 1 1\n");
    let (code, r) = structured(&["semigroup-certify", &a, "--semigroup", "Z2"]);
    assert_eq!((code, r["character"].as_str()), (2, Some("z = -2")));
    let sq = f.put("sq.txt", "0 0 2\n1 0 1\n0 1 1\n1 1 1\n");
    let cert = f.path("sq.cert");
    let (code, _) = structured(&["semigroup-certify", &sq, "--semigroup", "Z2", "--output", cert.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(structured(&["verify", cert.to_str().unwrap()]).0, 0);
    let ones: String = (-2..=2).flat_map(|k| (-2..=2).map(move |n| format!("{k} {n} 1\n"))).collect();
    let l = f.put("l.txt", &ones);
    let (code, r) = structured(&["semigroup-psd", &l, "--semigroup", "Z2"]);
    assert_eq!((code, r["rank"].as_u64()), (0, Some(1)));
    let skew = ones.replacen("0 0 1", "0 0 -1", 1);
    let l = f.put("skew.txt", &skew);
    assert_eq!(structured(&["semigroup-psd", &l, "--semigroup", "Z2"]).0, 2);
}

fn random_square_sum(rng: &mut ChaCha8Rng, vars: &[&str], deg: u32) -> String {
    let mons: Vec<String> = match vars.len() {
        1 => (0..=deg).map(|a| format!("{}^{a}", vars[0])).collect(),
        _ => (0..=deg)
            .flat_map(|a| (0..=deg - a).map(move |b| (a, b)))
            .map(|(a, b)| format!("{}^{a}*{}^{b}", vars[0], vars[1]))
            .collect(),
    };
    let mut parts = Vec::new();
    for _ in 0..rng.gen_range(2..=3) {
        let q: Vec<String> = mons.iter().map(|m| format!("({})*{m}", rng.gen_range(-3..=3))).collect();
        parts.push(format!("({})^2", q.join(" + ")));
    }
    parts.push("1".into());
    parts.join(" + ")
}

#[test]
fn verify_accepts_every_emitted_certificate() {
    let f = Files::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cert = f.path("c.cert");
    let c = cert.to_str().unwrap();
    let mut emitted = 0;
    for case in 0..100 {
        let (code, _) = match case % 4 {
            0 => {
                let p = f.put("p.txt", &random_square_sum(&mut rng, &["t"], 3));
                structured(&["sos", &p, "--output", c])
            }
            1 => {
                let p = f.put("p.txt", &random_square_sum(&mut rng, &["x", "y"], 1));
                structured(&["sos", &p, "--output", c])
            }
            2 => {
                let p = f.put("p.txt", &format!("{} + ({})*(1 - x^2 - y^2)", random_square_sum(&mut rng, &["x", "z"], 1), rng.gen_range(-3..=3)));
                structured(&["cylinder-sos", &p, "--output", c])
            }
            _ => {
                let k = rng.gen_range(-1..=1);
                let n = rng.gen_range(-1..=1);
                let (re, im) = (rng.gen_range(1..=3), rng.gen_range(-3..=3));
                // |c0 + c·δ(k,n)|² + 1
                let body = format!(
                    "0 0 {}\n{k} {n} {re} {}\n{n} {k} {re} {im}\n{} {} {}\n",
                    2,
                    -im,
                    k + n,
                    k + n,
                    re * re + im * im
                );
                let a = f.put("a.txt", &body);
                structured(&["semigroup-certify", &a, "--semigroup", "Z2", "--output", c])
            }
        };
        if code == 0 {
            emitted += 1;
            let (vcode, v) = structured(&["verify", c]);
            assert_eq!((vcode, v["result"].as_str()), (0, Some("PASS")), "case {case}");
        }
        let _ = fs::remove_file(&cert);
    }
    assert!(emitted >= 90, "only {emitted} certificates emitted");
}

#[test]
fn text_report_lists_fields() {
    let f = Files::new();
    let d = f.put("d.txt", "d=2\nz1\nz2\nz1 + 1 + i\n");
    let (code, out, _) = run(&["fibres", &d, "--angles", "pi/4 pi/4 pi/4"]);
    assert_eq!(code, 0);
    assert!(out.contains("reduced: x1 - y1 = 0\n") && out.contains("reduced: x2 - y2 = 0\n"), "{out}");
    assert!(out.contains("seed: 0\n") && out.contains("m_max: 6\n"));
}
