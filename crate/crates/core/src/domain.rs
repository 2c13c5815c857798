/// A finite domain of integer values, kept sorted ascending.
///
/// Emptiness signals failure of the owning variable; removal is monotone
/// within a search node and is undone only by backtracking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    values: Vec<i32>,
}

impl Domain {
    /// Builds a domain from arbitrary values; duplicates collapse.
    pub fn new(values: impl IntoIterator<Item = i32>) -> Self {
        let mut values: Vec<i32> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        Domain { values }
    }

    pub fn range(lo: i32, hi: i32) -> Self {
        Domain {
            values: (lo..=hi).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, value: i32) -> bool {
        self.values.binary_search(&value).is_ok()
    }

    /// The single value of a bound domain, if bound.
    pub fn singleton(&self) -> Option<i32> {
        if self.values.len() == 1 {
            Some(self.values[0])
        } else {
            None
        }
    }

    pub fn min(&self) -> Option<i32> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<i32> {
        self.values.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> + '_ {
        self.values.iter().copied()
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    /// Removes `value` if present; returns whether anything was removed.
    pub(crate) fn remove(&mut self, value: i32) -> bool {
        match self.values.binary_search(&value) {
            Ok(idx) => {
                self.values.remove(idx);
                true
            }
            Err(_) => false,
        }
    }

    /// Re-inserts a value removed earlier (trail undo).
    pub(crate) fn insert(&mut self, value: i32) {
        if let Err(idx) = self.values.binary_search(&value) {
            self.values.insert(idx, value);
        }
    }
}

impl<const N: usize> From<[i32; N]> for Domain {
    fn from(values: [i32; N]) -> Self {
        Domain::new(values)
    }
}
