use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A channel name: a human-readable base plus a freshness index.
///
/// User-written names have index 0. Fresh names produced by [`fresh_name`]
/// reuse the base and bump the index, so generation is deterministic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    base: Arc<str>,
    index: u32,
}

impl Name {
    pub fn new(base: &str) -> Self {
        Name { base: Arc::from(base), index: 0 }
    }

    pub fn indexed(base: &str, index: u32) -> Self {
        Name { base: Arc::from(base), index }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn index(&self) -> u32 {
        self.index
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            f.write_str(&self.base)
        } else {
            write!(f, "{}#{}", self.base, self.index)
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

/// Smallest-index name with the given base that is not in `avoid`.
pub fn fresh_name(hint: &str, avoid: &BTreeSet<Name>) -> Name {
    let mut k = 0;
    loop {
        let n = Name::indexed(hint, k);
        if !avoid.contains(&n) {
            return n;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_form() {
        assert_eq!(Name::new("a").to_string(), "a");
        assert_eq!(Name::indexed("z", 3).to_string(), "z#3");
    }

    #[test]
    fn fresh_picks_smallest_index() {
        let mut avoid = BTreeSet::new();
        assert_eq!(fresh_name("z", &avoid), Name::new("z"));
        avoid.insert(Name::new("z"));
        assert_eq!(fresh_name("z", &avoid), Name::indexed("z", 1));
        avoid.insert(Name::indexed("z", 1));
        assert_eq!(fresh_name("z", &avoid), Name::indexed("z", 2));
    }

    #[test]
    fn equality_is_componentwise() {
        assert_ne!(Name::new("a"), Name::indexed("a", 1));
        assert_eq!(Name::indexed("a", 1), Name::indexed("a", 1));
    }
}
