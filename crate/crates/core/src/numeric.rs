//! Small floating-point helpers shared by the walk, Fourier and Diophantine code.

/// Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Signed distance from `Σ c_i x_i` to the nearest integer, in `[-1/2, 1/2]`.
///
/// Each coefficient must be an integer with magnitude below `2^52`. Products are
/// split into an exactly reduced head and an FMA-recovered rounding tail, so the
/// result carries roughly full double precision even for large coefficients.
/// Negating every coefficient negates the result exactly.
pub fn centered_residue<I>(terms: I) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut head = 0.0;
    let mut tail = 0.0;
    for (c, x) in terms {
        let p = c * x;
        let e = c.mul_add(x, -p);
        head += p - p.round();
        tail += e;
    }
    let s = head + tail;
    s - s.round()
}

/// Maps a centered residue onto the fundamental domain `[0, 1)`.
pub fn residue_to_unit(r: f64) -> f64 {
    let t = if r < 0.0 { r + 1.0 } else { r };
    if t >= 1.0 {
        0.0
    } else {
        // Normalises -0.0.
        t + 0.0
    }
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// At least 17 significant digits in scientific notation; round-trips through `str::parse`.
pub fn sci17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Plain decimal notation with at least 17 significant digits.
pub fn decimal17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i64;
    let places = (17 - exp).max(0) as usize;
    format!("{x:.places$}")
}
