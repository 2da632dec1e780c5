//! Identifiers with natural ordering (`X2 < X10`).

use std::cmp::Ordering;
use std::fmt;

/// Opaque label of a piece, wall, pair, crossing, strand, circle or surface.
///
/// Ordering is "natural": maximal runs of ASCII digits compare numerically,
/// everything else compares bytewise. Canonical serialization and every
/// deterministic tie-break in the crate rely on this order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Id(String);

impl Id {
    pub fn new(s: impl Into<String>) -> Self {
        Id(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the label is non-empty and uses only `[A-Za-z0-9_]`.
    pub fn is_well_formed(s: &str) -> bool {
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
    }
}

impl fmt::Debug for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Id {
    fn from(s: &str) -> Self {
        Id(s.to_string())
    }
}

impl From<String> for Id {
    fn from(s: String) -> Self {
        Id(s)
    }
}

impl PartialOrd for Id {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Id {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].is_ascii_digit() && b[j].is_ascii_digit() {
            let si = i;
            while i < a.len() && a[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            let da = trim_zeros(&a[si..i]);
            let db = trim_zeros(&b[sj..j]);
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
            // equal values: fewer leading zeros first
            let ord = (i - si).cmp(&(j - sj));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            let ord = a[i].cmp(&b[j]);
            if ord != Ordering::Equal {
                return ord;
            }
            i += 1;
            j += 1;
        }
    }
    (a.len() - i).cmp(&(b.len() - j))
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let k = d.iter().take_while(|&&c| c == b'0').count();
    &d[k..]
}

/// Smallest `prefix<n>` (n ≥ 1) not already taken.
pub fn fresh_id<'a, I>(prefix: &str, taken: I) -> Id
where
    I: IntoIterator<Item = &'a Id>,
{
    let used: std::collections::HashSet<&str> = taken.into_iter().map(|i| i.as_str()).collect();
    (1..)
        .map(|n| format!("{prefix}{n}"))
        .find(|s| !used.contains(s.as_str()))
        .map(Id)
        .expect("unbounded range")
}

/// Hands out `prefix<n>` labels avoiding an initial set and each other.
pub struct FreshIds {
    prefix: String,
    taken: std::collections::HashSet<String>,
    next: usize,
}

impl FreshIds {
    pub fn new<'a, I>(prefix: &str, taken: I) -> Self
    where
        I: IntoIterator<Item = &'a Id>,
    {
        FreshIds {
            prefix: prefix.to_string(),
            taken: taken.into_iter().map(|i| i.0.clone()).collect(),
            next: 1,
        }
    }

    pub fn next_id(&mut self) -> Id {
        loop {
            let s = format!("{}{}", self.prefix, self.next);
            self.next += 1;
            if self.taken.insert(s.clone()) {
                return Id(s);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order() {
        let mut v: Vec<Id> = ["X10", "X2", "X1", "A", "X02", "B1"].iter().map(|s| Id::from(*s)).collect();
        v.sort();
        let s: Vec<&str> = v.iter().map(|i| i.as_str()).collect();
        assert_eq!(s, ["A", "B1", "X1", "X2", "X02", "X10"]);
    }

    #[test]
    fn fresh_skips_taken() {
        let taken = [Id::from("X1"), Id::from("X3")];
        assert_eq!(fresh_id("X", taken.iter()), Id::from("X2"));
    }
}
