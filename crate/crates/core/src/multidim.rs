//! Eight-dimensional multidimensional reconciliation.
//!
//! Bob normalizes each 8-sample block of his Gaussian data to a point `y′` on
//! the unit sphere, draws `u ∈ {±1/√8}⁸` and publishes the coefficients
//! `α` of an orthogonal map `M = Σ αᵢ Aᵢ` with `M·y′ = u`. Alice applies the
//! same map to her own normalized block, `v = M·x′`, which turns the Gaussian
//! channel into a binary-input AWGN channel carrying the signs of `u`.
//!
//! The family `A₁..A₈` is the left multiplication by the octonion units
//! `e₀..e₇`. With indices taken mod 7 over 1..7 the products are
//! `eᵢ·eᵢ₊₁ = eᵢ₊₃`; equivalently the seven Fano-plane lines are
//!
//! ```text
//! (1,2,4) (2,3,5) (3,4,6) (4,5,7) (5,6,1) (6,7,2) (7,1,3)
//! ```
//!
//! read cyclically (`eₐ·e_b = e_c`, reversed order flips the sign), with
//! `e₀ = 1` and `eᵢ² = −1`. Each `Aᵢ` is a signed permutation, `A₁ = I`, the
//! others are antisymmetric, and distinct members anticommute. Hence the
//! vectors `Aᵢ·y′` form an orthonormal basis whenever `‖y′‖ = 1`, the
//! coefficients `αᵢ = uᵀAᵢy′` reproduce `u`, and `M` is orthogonal.
//!
//! Bit convention everywhere: bit 0 ↔ +1/√8, bit 1 ↔ −1/√8. Bit `i` of a
//! packed `u8` is coordinate `i`.

use crate::{Error, Result};

pub const DIM: usize = 8;

pub type Block = [f64; DIM];

const FANO_LINES: [[usize; 3]; 7] = [
    [1, 2, 4],
    [2, 3, 5],
    [3, 4, 6],
    [4, 5, 7],
    [5, 6, 1],
    [6, 7, 2],
    [7, 1, 3],
];

const UNIT_TOLERANCE: f64 = 1e-9;

/// Product of octonion units: `e_a · e_b = sign · e_k`.
fn unit_product(a: usize, b: usize) -> (f64, usize) {
    if a == 0 {
        return (1.0, b);
    }
    if b == 0 {
        return (1.0, a);
    }
    if a == b {
        return (-1.0, 0);
    }
    for line in FANO_LINES {
        for rot in 0..3 {
            let (x, y, z) = (line[rot], line[(rot + 1) % 3], line[(rot + 2) % 3]);
            if (x, y) == (a, b) {
                return (1.0, z);
            }
            if (y, x) == (a, b) {
                return (-1.0, z);
            }
        }
    }
    unreachable!("every pair of distinct imaginary units lies on one line")
}

/// The eight signed-permutation matrices `A₁..A₈`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalFamily {
    // (Aᵢ·x)[k] = sign[i][k] · x[source[i][k]]
    source: [[usize; DIM]; DIM],
    sign: [[f64; DIM]; DIM],
}

impl Default for OrthogonalFamily {
    fn default() -> Self {
        Self::octonion()
    }
}

impl OrthogonalFamily {
    pub fn octonion() -> Self {
        let mut source = [[0usize; DIM]; DIM];
        let mut sign = [[0f64; DIM]; DIM];
        for a in 0..DIM {
            for j in 0..DIM {
                let (s, k) = unit_product(a, j);
                source[a][k] = j;
                sign[a][k] = s;
            }
        }
        OrthogonalFamily { source, sign }
    }

    /// `Aᵢ·x` for `i` in `0..8` (`i = 0` is the identity).
    pub fn apply(&self, i: usize, x: &Block) -> Block {
        let mut out = [0.0; DIM];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.sign[i][k] * x[self.source[i][k]];
        }
        out
    }

    /// Dense form of `Aᵢ`, row-major.
    pub fn matrix(&self, i: usize) -> [[f64; DIM]; DIM] {
        let mut a = [[0.0; DIM]; DIM];
        for (k, row) in a.iter_mut().enumerate() {
            row[self.source[i][k]] = self.sign[i][k];
        }
        a
    }

    /// Dense `M = Σ αᵢ Aᵢ`.
    pub fn mapping_matrix(&self, alpha: &Block) -> [[f64; DIM]; DIM] {
        let mut m = [[0.0; DIM]; DIM];
        for (i, &a) in alpha.iter().enumerate() {
            for (k, row) in m.iter_mut().enumerate() {
                row[self.source[i][k]] += a * self.sign[i][k];
            }
        }
        m
    }
}

pub fn norm(x: &Block) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Splits a block into its unit direction and its norm.
pub fn normalize(x: &Block) -> Result<(Block, f64)> {
    let r = norm(x);
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::NotUnitNorm(r));
    }
    Ok((x.map(|v| v / r), r))
}

/// The sphere point `((−1)^bitᵢ)/√8` for the packed bits.
pub fn sphere_point(bits: u8) -> Block {
    let c = 1.0 / (DIM as f64).sqrt();
    std::array::from_fn(|i| if (bits >> i) & 1 == 0 { c } else { -c })
}

/// Unpacks the eight bits of `bits`, coordinate order.
pub fn unpack_bits(bits: u8) -> [u8; DIM] {
    std::array::from_fn(|i| (bits >> i) & 1)
}

fn require_unit(x: &Block) -> Result<()> {
    let r = norm(x);
    if (r - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotUnitNorm(r));
    }
    Ok(())
}

/// Coefficients `αᵢ = uᵀ·(Aᵢ·y′)` of the map sending `y′` to `u`.
pub fn map_coefficients(y_unit: &Block, u: &Block, fam: &OrthogonalFamily) -> Result<Block> {
    require_unit(y_unit)?;
    require_unit(u)?;
    let mut alpha = [0.0; DIM];
    for (i, a) in alpha.iter_mut().enumerate() {
        *a = (0..DIM)
            .map(|k| u[k] * fam.sign[i][k] * y_unit[fam.source[i][k]])
            .sum();
    }
    Ok(alpha)
}

/// `v = (Σ αᵢ Aᵢ)·x′`.
pub fn apply_mapping(x_unit: &Block, alpha: &Block, fam: &OrthogonalFamily) -> Result<Block> {
    require_unit(alpha)?;
    let mut v = [0.0; DIM];
    for (i, &a) in alpha.iter().enumerate() {
        for (k, out) in v.iter_mut().enumerate() {
            *out += a * fam.sign[i][k] * x_unit[fam.source[i][k]];
        }
    }
    Ok(v)
}

/// Per-coordinate LLRs of Alice's rotated block.
///
/// With `y = x + z`, `z ~ N(0, 1/snr)`, Alice's unnormalized output
/// `M·x = ‖x‖·v` equals `(‖y‖/(1 + σ²))·u` plus white Gaussian noise of
/// variance `σ²/(1 + σ²)` per coordinate, so each coordinate is a BPSK channel
/// with amplitude `‖y‖/((1 + σ²)√8)`. The resulting LLR is
///
/// ```text
/// LLRᵢ = 2 · snr · ‖x‖ · ‖y‖ · vᵢ / √8
/// ```
///
/// Positive means bit 0.
pub fn block_llrs(v: &Block, snr: f64, x_norm: f64, y_norm: f64) -> Block {
    let scale = 2.0 * snr * x_norm * y_norm / (DIM as f64).sqrt();
    v.map(|vi| scale * vi)
}

/// A block run through both sides of the mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconciliationBlock {
    pub x: Block,
    pub y: Block,
    pub x_norm: f64,
    pub y_norm: f64,
    pub u_bits: u8,
    pub alpha: Block,
    pub v: Block,
}

impl ReconciliationBlock {
    pub fn reconcile(x: Block, y: Block, u_bits: u8, fam: &OrthogonalFamily) -> Result<Self> {
        let (y_unit, y_norm) = normalize(&y)?;
        let (x_unit, x_norm) = normalize(&x)?;
        let alpha = map_coefficients(&y_unit, &sphere_point(u_bits), fam)?;
        let v = apply_mapping(&x_unit, &alpha, fam)?;
        Ok(ReconciliationBlock {
            x,
            y,
            x_norm,
            y_norm,
            u_bits,
            alpha,
            v,
        })
    }

    pub fn llrs(&self, snr: f64) -> Block {
        block_llrs(&self.v, snr, self.x_norm, self.y_norm)
    }
}

/// Side-information record: eight little-endian f64 coefficients per block.
pub fn encode_side_info(alphas: &[Block]) -> Vec<u8> {
    alphas
        .iter()
        .flat_map(|a| a.iter().flat_map(|v| v.to_le_bytes()))
        .collect()
}

pub fn decode_side_info(bytes: &[u8]) -> Result<Vec<Block>> {
    if bytes.len() % (DIM * 8) != 0 {
        return Err(Error::Parse(format!(
            "side information length {} is not a multiple of {}",
            bytes.len(),
            DIM * 8
        )));
    }
    Ok(bytes
        .chunks_exact(DIM * 8)
        .map(|chunk| {
            std::array::from_fn(|i| {
                f64::from_le_bytes(chunk[i * 8..(i + 1) * 8].try_into().unwrap())
            })
        })
        .collect())
}

/// Per-block norm record (`‖y‖`, little-endian f64), sent alongside α.
pub fn encode_norms(norms: &[f64]) -> Vec<u8> {
    norms.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn decode_norms(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Parse("norm record length is not a multiple of 8".into()));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    type Mat = [[f64; DIM]; DIM];

    fn mat_mul(a: &Mat, b: &Mat) -> Mat {
        let mut c = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                c[i][j] = (0..DIM).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    }

    fn transpose(a: &Mat) -> Mat {
        let mut t = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                t[j][i] = a[i][j];
            }
        }
        t
    }

    fn mat_vec(a: &Mat, x: &Block) -> Block {
        std::array::from_fn(|i| (0..DIM).map(|k| a[i][k] * x[k]).sum())
    }

    #[test]
    fn family_is_orthogonal_and_anticommuting() {
        let fam = OrthogonalFamily::octonion();
        assert_eq!(fam.matrix(0), {
            let mut id = [[0.0; DIM]; DIM];
            for (i, row) in id.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            id
        });
        for i in 0..DIM {
            let a = fam.matrix(i);
            let aat = mat_mul(&a, &transpose(&a));
            for r in 0..DIM {
                for c in 0..DIM {
                    assert_eq!(aat[r][c], if r == c { 1.0 } else { 0.0 });
                }
            }
            for j in 0..DIM {
                if i == j {
                    continue;
                }
                let b = fam.matrix(j);
                let s1 = mat_mul(&transpose(&a), &b);
                let s2 = mat_mul(&transpose(&b), &a);
                for r in 0..DIM {
                    for c in 0..DIM {
                        assert_eq!(s1[r][c] + s2[r][c], 0.0, "A{i}ᵀA{j} + A{j}ᵀA{i}");
                    }
                }
            }
        }
    }

    #[test]
    fn identical_points_give_identity() {
        let fam = OrthogonalFamily::octonion();
        let u = sphere_point(0b1011_0010);
        let alpha = map_coefficients(&u, &u, &fam).unwrap();
        assert!((alpha[0] - 1.0).abs() < 1e-15);
        for &a in &alpha[1..] {
            assert!(a.abs() < 1e-15);
        }
    }

    #[test]
    fn antipodal_point() {
        let fam = OrthogonalFamily::octonion();
        let u = sphere_point(0b0101_0110);
        let y = u.map(|x| -x);
        let alpha = map_coefficients(&y, &u, &fam).unwrap();
        let m = fam.mapping_matrix(&alpha);
        let my = mat_vec(&m, &y);
        for k in 0..DIM {
            assert!((my[k] - u[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_mapping_and_noiseless_agreement() {
        let fam = OrthogonalFamily::octonion();
        let mut alpha = [0.0; DIM];
        alpha[0] = 1.0;
        let x = normalize(&[0.3, -1.2, 0.7, 0.1, 2.0, -0.4, 0.9, -0.2]).unwrap().0;
        assert_eq!(apply_mapping(&x, &alpha, &fam).unwrap(), x);

        let u = sphere_point(0b1110_0001);
        let a = map_coefficients(&x, &u, &fam).unwrap();
        let v = apply_mapping(&x, &a, &fam).unwrap();
        for k in 0..DIM {
            assert!((v[k] - u[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn non_unit_inputs_rejected() {
        let fam = OrthogonalFamily::octonion();
        let u = sphere_point(0);
        let y = [1.0; DIM];
        assert!(matches!(map_coefficients(&y, &u, &fam), Err(Error::NotUnitNorm(_))));
        assert!(matches!(
            apply_mapping(&u, &[0.5; DIM], &fam),
            Err(Error::NotUnitNorm(_))
        ));
        assert!(normalize(&[0.0; DIM]).is_err());
    }

    #[test]
    fn llr_signs_follow_bits() {
        let u_bits = 0b1001_0110u8;
        let v = sphere_point(u_bits);
        let llr = block_llrs(&v, 0.03, 2.8, 2.9);
        for (i, l) in llr.iter().enumerate() {
            assert_eq!(*l > 0.0, (u_bits >> i) & 1 == 0);
        }
        let mut prev = f64::INFINITY;
        for snr in [1.0, 0.1, 0.01, 0.001, 0.0] {
            let mag = block_llrs(&v, snr, 2.8, 2.9)[0].abs();
            assert!(mag < prev);
            prev = mag;
        }
        assert_eq!(prev, 0.0);
    }

    #[test]
    fn side_info_round_trip() {
        let alphas = vec![[0.25; DIM], sphere_point(3)];
        let bytes = encode_side_info(&alphas);
        assert_eq!(bytes.len(), 128);
        assert_eq!(&bytes[..8], &0.25f64.to_le_bytes());
        assert_eq!(decode_side_info(&bytes).unwrap(), alphas);
        assert!(decode_side_info(&bytes[..5]).is_err());
        assert_eq!(decode_norms(&encode_norms(&[1.5, 2.5])).unwrap(), vec![1.5, 2.5]);
    }
}
