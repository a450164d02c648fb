/// Fixed-length sample delay backed by a ring buffer.
///
/// After `k` pushes, [`DelayLine::tap`] yields the sample pushed at index
/// `k - len` (or the initial value while the line is still priming).
#[derive(Debug, Clone, PartialEq)]
pub struct DelayLine {
    buf: Vec<f64>,
    head: usize,
    filled: usize,
}

impl DelayLine {
    pub fn new(len: usize) -> Self {
        Self::with_initial(len, 0.0)
    }

    pub fn with_initial(len: usize, initial: f64) -> Self {
        assert!(len > 0, "delay length must be positive");
        DelayLine {
            buf: vec![initial; len],
            head: 0,
            filled: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_primed(&self) -> bool {
        self.filled >= self.buf.len()
    }

    /// Sample delayed by exactly `len` pushes.
    pub fn tap(&self) -> f64 {
        self.buf[self.head]
    }

    /// Sample delayed by `len - ahead` pushes; `tap_ahead(0) == tap()`.
    pub fn tap_ahead(&self, ahead: usize) -> f64 {
        assert!(ahead < self.buf.len());
        self.buf[(self.head + ahead) % self.buf.len()]
    }

    /// Pushes `x` and returns the sample it displaces (the delayed value).
    pub fn push(&mut self, x: f64) -> f64 {
        let out = self.buf[self.head];
        self.buf[self.head] = x;
        self.head = (self.head + 1) % self.buf.len();
        self.filled = self.filled.saturating_add(1);
        out
    }
}
