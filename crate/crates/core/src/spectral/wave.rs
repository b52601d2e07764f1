use std::f64::consts::TAU;

/// Integer Fourier index on the periodic cube.
///
/// The scaled frequency `κ = 2πk/l` is always derived from the box size on
/// demand and never cached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveVector(pub [i64; 3]);

impl WaveVector {
    pub const ZERO: WaveVector = WaveVector([0, 0, 0]);

    pub fn new(k1: i64, k2: i64, k3: i64) -> Self {
        WaveVector([k1, k2, k3])
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    pub fn neg(&self) -> Self {
        WaveVector([-self.0[0], -self.0[1], -self.0[2]])
    }

    /// Largest |k_i|.
    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Integer |k|².
    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn kappa(&self, box_l: f64) -> [f64; 3] {
        let s = TAU / box_l;
        [s * self.0[0] as f64, s * self.0[1] as f64, s * self.0[2] as f64]
    }

    pub fn kappa_sq(&self, box_l: f64) -> f64 {
        let s = TAU / box_l;
        s * s * self.norm_sq() as f64
    }

    /// One member of each `±k` pair: the one whose first nonzero index is
    /// positive. The zero vector is not a representative.
    pub fn is_representative(&self) -> bool {
        match self.0.iter().find(|c| **c != 0) {
            Some(c) => *c > 0,
            None => false,
        }
    }
}

impl From<[i64; 3]> for WaveVector {
    fn from(k: [i64; 3]) -> Self {
        WaveVector(k)
    }
}
