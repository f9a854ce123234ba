use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, Mat, Quaternion, C64};

/// 3x3 quaternionic matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuatMat3(pub [[Quaternion; 3]; 3]);

impl QuatMat3 {
    pub fn identity() -> Self {
        Self::diag([Quaternion::ONE; 3])
    }

    pub fn diag(d: [Quaternion; 3]) -> Self {
        let mut m = [[Quaternion::ZERO; 3]; 3];
        for i in 0..3 {
            m[i][i] = d[i];
        }
        Self(m)
    }

    /// The hyperbolic model element `diag(e^b, 1, e^-b)`.
    pub fn hyperbolic(b: f64) -> Self {
        Self::diag([Quaternion::real(b.exp()), Quaternion::ONE, Quaternion::real((-b).exp())])
    }

    pub fn mul(&self, o: &QuatMat3) -> QuatMat3 {
        let mut m = [[Quaternion::ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = Quaternion::ZERO;
                for k in 0..3 {
                    acc = acc + self.0[i][k] * o.0[k][j];
                }
                *cell = acc;
            }
        }
        QuatMat3(m)
    }
}

/// `a + b i + c j + d k -> [[a + b i, c + d i], [-c + d i, a - b i]]`.
pub fn tau_scalar(q: Quaternion) -> [[C64; 2]; 2] {
    [
        [C64::new(q.a, q.b), C64::new(q.c, q.d)],
        [C64::new(-q.c, q.d), C64::new(q.a, -q.b)],
    ]
}

/// Complex realization `GL_3(H) -> GL_6(C)`, entrywise 2x2 blocks.
pub fn tau(a: &QuatMat3) -> Mat {
    let mut m = CMatrix::zeros(6, 6);
    for i in 0..3 {
        for j in 0..3 {
            let b = tau_scalar(a.0[i][j]);
            for (s, row) in b.iter().enumerate() {
                for (t, z) in row.iter().enumerate() {
                    m[(2 * i + s, 2 * j + t)] = *z;
                }
            }
        }
    }
    Mat::from_complex(m)
}
