use crate::scalar::Scalar;

/// One iterate of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Record<T> {
    pub t: usize,
    pub theta: Vec<T>,
    pub velocity: Vec<T>,
    pub objective_value: T,
}

/// Iterates of a run in increasing `t`, starting at `t = 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace<T> {
    records: Vec<Record<T>>,
}

impl<T: Scalar> Trace<T> {
    pub fn new() -> Self {
        Trace {
            records: Vec::new(),
        }
    }

    /// Appends a record. Panics if `t` does not continue the sequence.
    pub fn push(&mut self, record: Record<T>) {
        let expected = self.records.len() + 1;
        assert_eq!(record.t, expected, "trace records must be consecutive from t = 1");
        self.records.push(record);
    }

    pub fn records(&self) -> &[Record<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Record<T>> {
        self.records.last()
    }

    /// Component `i` of every recorded `theta`.
    pub fn component(&self, i: usize) -> Vec<T> {
        self.records.iter().map(|r| r.theta[i]).collect()
    }

    pub fn objective_values(&self) -> Vec<T> {
        self.records.iter().map(|r| r.objective_value).collect()
    }
}
