//! Pseudo-orthonormal frames and the positive-definite frame norm.
//!
//! The invariant pairing of Lorentzian tensors is indefinite, so "is this
//! tensor zero" is decided on its components in a frame `e_a` with
//! `g(e_a, e_b) = diag(-1, 1, 1, 1)`, built by Gram–Schmidt from the
//! coordinate basis with the timelike leg first.

use thiserror::Error;

use crate::linalg::Mat4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("g_00 = {0} is not negative; the coordinate basis has no timelike first leg")]
    NotTimelike(f64),
    #[error("Gram-Schmidt produced a non-spacelike leg {leg} (norm {norm})")]
    Degenerate { leg: usize, norm: f64 },
}

/// Index position of one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// `legs[a][i]`: coordinate components of `e_a`.
    pub legs: Mat4,
    /// `coframe[a][i]`: components of the dual covector `θ^a`.
    pub coframe: Mat4,
}

const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

impl Frame {
    pub fn new(g: &Mat4) -> Result<Frame, FrameError> {
        if !(g[0][0] < 0.0) {
            return Err(FrameError::NotTimelike(g[0][0]));
        }
        let dot = |u: &[f64; 4], v: &[f64; 4]| -> f64 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += g[i][j] * u[i] * v[j];
                }
            }
            s
        };
        let mut legs = [[0.0; 4]; 4];
        for a in 0..4 {
            let mut v = [0.0; 4];
            v[a] = 1.0;
            for b in 0..a {
                let c = ETA[b] * dot(&v, &legs[b]);
                for i in 0..4 {
                    v[i] -= c * legs[b][i];
                }
            }
            let n = dot(&v, &v);
            let n = if a == 0 { -n } else { n };
            if !(n > 0.0) {
                return Err(FrameError::Degenerate { leg: a, norm: n });
            }
            let inv = 1.0 / n.sqrt();
            legs[a] = v.map(|x| x * inv);
        }
        // θ^a_i = η^{aa} g_{ij} e_a^j
        let mut coframe = [[0.0; 4]; 4];
        for a in 0..4 {
            for i in 0..4 {
                coframe[a][i] = ETA[a] * (0..4).map(|j| g[i][j] * legs[a][j]).sum::<f64>();
            }
        }
        Ok(Frame { legs, coframe })
    }

    /// Frame components of a tensor stored row-major with the given slot positions.
    pub fn components(&self, data: &[f64], slots: &[Slot]) -> Vec<f64> {
        assert_eq!(data.len(), 4usize.pow(slots.len() as u32), "component count must be 4^rank");
        let mut cur = data.to_vec();
        let mut next = vec![0.0; cur.len()];
        let rank = slots.len();
        for (s, slot) in slots.iter().enumerate() {
            let m = match slot {
                Slot::Lower => &self.legs,
                Slot::Upper => &self.coframe,
            };
            let stride = 4usize.pow((rank - 1 - s) as u32);
            let block = stride * 4;
            for base in (0..cur.len()).step_by(block) {
                for inner in 0..stride {
                    let src = |i: usize| cur[base + i * stride + inner];
                    let col = [src(0), src(1), src(2), src(3)];
                    for a in 0..4 {
                        next[base + a * stride + inner] = (0..4).map(|i| m[a][i] * col[i]).sum();
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// Euclidean norm of the frame components.
    pub fn norm(&self, data: &[f64], slots: &[Slot]) -> f64 {
        self.components(data, slots).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Norm of a tensor with every slot lower.
    pub fn norm_lower(&self, data: &[f64]) -> f64 {
        let rank = (data.len() as f64).log(4.0).round() as usize;
        self.norm(data, &vec![Slot::Lower; rank])
    }
}

/// One-shot frame norm at metric `g`.
pub fn frame_norm(data: &[f64], slots: &[Slot], g: &Mat4) -> Result<f64, FrameError> {
    Ok(Frame::new(g)?.norm(data, slots))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schwarzschild(r: f64, theta: f64) -> Mat4 {
        let f = 1.0 - 2.0 / r;
        let mut g = [[0.0; 4]; 4];
        g[0][0] = -f;
        g[1][1] = 1.0 / f;
        g[2][2] = r * r;
        g[3][3] = (r * theta.sin()).powi(2);
        g
    }

    fn skewed() -> Mat4 {
        [[-2.0, 0.3, 0.1, 0.0], [0.3, 1.5, 0.2, 0.1], [0.1, 0.2, 0.8, -0.1], [0.0, 0.1, -0.1, 3.0]]
    }

    #[test]
    fn frame_is_pseudo_orthonormal() {
        let g = skewed();
        let f = Frame::new(&g).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        s += g[i][j] * f.legs[a][i] * f.legs[b][j];
                    }
                }
                let want = if a == b { ETA[a] } else { 0.0 };
                assert!((s - want).abs() < 1e-14);
                let pair: f64 = (0..4).map(|i| f.coframe[a][i] * f.legs[b][i]).sum();
                assert!((pair - if a == b { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn metric_has_norm_two() {
        for g in [schwarzschild(10.0, 1.0), skewed()] {
            let flat: Vec<f64> = g.iter().flatten().copied().collect();
            assert!((frame_norm(&flat, &[Slot::Lower, Slot::Lower], &g).unwrap() - 2.0).abs() < 1e-13);
            let ginv = crate::linalg::inverse(&g).unwrap();
            let flat: Vec<f64> = ginv.iter().flatten().copied().collect();
            assert!((frame_norm(&flat, &[Slot::Upper, Slot::Upper], &g).unwrap() - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_and_bad_charts() {
        let g = skewed();
        assert_eq!(frame_norm(&[0.0; 64], &[Slot::Lower; 3], &g).unwrap(), 0.0);
        let mut spacelike_t = g;
        spacelike_t[0][0] = 0.5;
        assert!(matches!(Frame::new(&spacelike_t), Err(FrameError::NotTimelike(_))));
    }

    #[test]
    fn mixed_slots_transform_independently() {
        // δ^i_j has frame components δ^a_b
        let g = skewed();
        let f = Frame::new(&g).unwrap();
        let mut delta = [0.0; 16];
        for i in 0..4 {
            delta[i * 4 + i] = 1.0;
        }
        let c = f.components(&delta, &[Slot::Upper, Slot::Lower]);
        for a in 0..4 {
            for b in 0..4 {
                assert!((c[a * 4 + b] - if a == b { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
