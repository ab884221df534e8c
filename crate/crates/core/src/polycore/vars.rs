use std::fmt;
use std::sync::Arc;

/// How a variable set is laid out; drives the involution and the
/// complex-to-real translation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    /// `z1..zd, zb1..zbd`
    Star { d: usize },
    /// `x1..xd, y1..yd` (or `x, y` when `d == 1`)
    Real { d: usize },
    Plain,
}

/// Ordered, named variables shared by a family of polynomials.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
    aliases: Vec<Vec<String>>,
    laurent: Vec<bool>,
    layout: Layout,
}

pub type Vars = Arc<VarSet>;

impl VarSet {
    pub fn plain<S: AsRef<str>>(names: &[S]) -> Vars {
        let n = names.len();
        Arc::new(Self {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
            aliases: vec![Vec::new(); n],
            laurent: vec![false; n],
            layout: Layout::Plain,
        })
    }

    /// Complex variables `z_j` and their conjugates `zb_j`.
    /// For `d == 1` the names are `z`, `zb` with `z1`, `zb1` accepted as aliases.
    pub fn star(d: usize, laurent: bool) -> Vars {
        let (names, aliases) = if d == 1 {
            (
                vec!["z".to_string(), "zb".to_string()],
                vec![vec!["z1".to_string()], vec!["zb1".to_string()]],
            )
        } else {
            let mut names: Vec<String> = (1..=d).map(|j| format!("z{j}")).collect();
            names.extend((1..=d).map(|j| format!("zb{j}")));
            (names, vec![Vec::new(); 2 * d])
        };
        Arc::new(Self {
            names,
            aliases,
            laurent: vec![laurent; 2 * d],
            layout: Layout::Star { d },
        })
    }

    /// Real coordinates `x_j = Re z_j`, `y_j = Im z_j`.
    pub fn real(d: usize) -> Vars {
        let (names, aliases) = if d == 1 {
            (
                vec!["x".to_string(), "y".to_string()],
                vec![vec!["x1".to_string()], vec!["y1".to_string()]],
            )
        } else {
            let mut names: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
            names.extend((1..=d).map(|j| format!("y{j}")));
            (names, vec![Vec::new(); 2 * d])
        };
        Arc::new(Self {
            names,
            aliases,
            laurent: vec![false; 2 * d],
            layout: Layout::Real { d },
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_laurent(&self, i: usize) -> bool {
        self.laurent[i]
    }

    pub fn any_laurent(&self) -> bool {
        self.laurent.iter().any(|&l| l)
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .or_else(|| self.aliases.iter().position(|a| a.iter().any(|n| n == name)))
    }

    /// Index of `z_j` / `zb_j` (0-based `j`) in a star layout.
    pub fn star_index(&self, j: usize, conjugate: bool) -> usize {
        match self.layout {
            Layout::Star { d } => {
                if conjugate {
                    d + j
                } else {
                    j
                }
            }
            _ => panic!("not a star variable set"),
        }
    }

    /// Same names without Laurent permissions.
    pub fn without_laurent(&self) -> Vars {
        Arc::new(Self {
            names: self.names.clone(),
            aliases: self.aliases.clone(),
            laurent: vec![false; self.names.len()],
            layout: self.layout,
        })
    }

    /// Canonical ordering of the real variable names the text grammar knows.
    pub fn infer_plain(found: &[String]) -> Option<Vars> {
        let mut keyed = Vec::with_capacity(found.len());
        for name in found {
            keyed.push((grammar_rank(name)?, name.clone()));
        }
        keyed.sort();
        keyed.dedup();
        let names: Vec<String> = keyed.into_iter().map(|(_, n)| n).collect();
        Some(Self::plain(&names))
    }
}

/// Position of a real variable name in the canonical order
/// `x, y, z, t, u, v, w, x1.., y1..`.
fn grammar_rank(name: &str) -> Option<(u32, u32)> {
    const SINGLE: [&str; 7] = ["x", "y", "z", "t", "u", "v", "w"];
    if let Some(p) = SINGLE.iter().position(|s| *s == name) {
        return Some((0, p as u32));
    }
    for (group, prefix) in [(1u32, "x"), (2, "y")] {
        if let Some(rest) = name.strip_prefix(prefix) {
            if let Ok(k) = rest.parse::<u32>() {
                if k >= 1 {
                    return Some((group, k));
                }
            }
        }
    }
    None
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_and_real_names() {
        let s = VarSet::star(2, false);
        assert_eq!(s.names(), &["z1", "z2", "zb1", "zb2"]);
        assert_eq!(s.star_index(1, true), 3);
        let s1 = VarSet::star(1, true);
        assert_eq!(s1.index_of("z1"), Some(0));
        assert_eq!(s1.index_of("zb"), Some(1));
        let r = VarSet::real(1);
        assert_eq!(r.index_of("y1"), Some(1));
    }

    #[test]
    fn inferred_order_is_canonical() {
        let v = VarSet::infer_plain(&["y".into(), "t".into(), "x".into(), "y".into()]).unwrap();
        assert_eq!(v.names(), &["x", "y", "t"]);
        assert!(VarSet::infer_plain(&["q".into()]).is_none());
    }
}
