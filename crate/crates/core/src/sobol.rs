//! Two-dimensional Sobol sequence with the standard direction numbers.
//!
//! Dimension one is the van der Corput sequence in base 2; dimension two uses
//! the primitive polynomial `x + 1` with initial direction number `m_1 = 1`.
//! Points are generated in Gray-code order, so point `i` is the XOR of the
//! direction numbers selected by the bits of `i ^ (i >> 1)`.

const BITS: usize = 32;

#[derive(Clone, Debug)]
pub struct Sobol2 {
    directions: [[u32; BITS]; 2],
    state: [u32; 2],
    index: u64,
}

impl Default for Sobol2 {
    fn default() -> Self {
        Self::new()
    }
}

impl Sobol2 {
    pub fn new() -> Self {
        let mut directions = [[0u32; BITS]; 2];
        for (j, d) in directions[0].iter_mut().enumerate() {
            *d = 1 << (BITS - 1 - j);
        }
        directions[1][0] = 1 << (BITS - 1);
        for j in 1..BITS {
            let prev = directions[1][j - 1];
            directions[1][j] = prev ^ (prev >> 1);
        }
        Sobol2 {
            directions,
            state: [0, 0],
            index: 0,
        }
    }

    /// Index of the point the next call to `next` returns.
    pub fn position(&self) -> u64 {
        self.index
    }

    /// Advances past `n` points.
    pub fn advance(&mut self, n: u64) {
        for _ in 0..n {
            self.next();
        }
    }
}

impl Iterator for Sobol2 {
    type Item = [f64; 2];

    fn next(&mut self) -> Option<[f64; 2]> {
        let scale = 1.0 / (1u64 << BITS) as f64;
        let point = [self.state[0] as f64 * scale, self.state[1] as f64 * scale];
        // the bit that flips between gray(i) and gray(i + 1) is the lowest zero bit of i
        let c = (!self.index).trailing_zeros() as usize;
        if c >= BITS {
            return None;
        }
        for (s, d) in self.state.iter_mut().zip(&self.directions) {
            *s ^= d[c];
        }
        self.index += 1;
        Some(point)
    }
}
