//! Floating point abstraction so the same cell code runs in `f32` for
//! evolution throughput and in `f64` for equivalence testing.

use std::fmt::{Debug, Display};

use num_traits::Float;

pub trait Scalar: Float + Debug + Display + Default + Send + Sync + 'static {
    fn of(x: f64) -> Self;

    fn as_f64(self) -> f64;

    /// `c = a · b` for row/column-strided operands, with `a` being `m×k` and
    /// `b` being `k×n`. `c` is overwritten.
    #[allow(clippy::too_many_arguments)]
    fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: &[Self],
        rsa: isize,
        csa: isize,
        b: &[Self],
        rsb: isize,
        csb: isize,
        c: &mut [Self],
        rsc: isize,
        csc: isize,
    );

    #[inline]
    fn sigmoid(self) -> Self {
        Self::one() / (Self::one() + (-self).exp())
    }

    /// Elementwise logistic function.
    fn sigmoid_slice(xs: &mut [Self]) {
        for x in xs {
            *x = x.sigmoid();
        }
    }

    fn tanh_slice(xs: &mut [Self]) {
        for x in xs {
            *x = x.tanh();
        }
    }
}

macro_rules! impl_scalar {
    ($t:ty, $kernel:path, fast) => {
        impl_scalar!(@base $t, $kernel, {
            fn sigmoid_slice(xs: &mut [Self]) {
                for x in xs {
                    *x = 1.0 / (1.0 + exp_f32(-*x));
                }
            }

            fn tanh_slice(xs: &mut [Self]) {
                for x in xs {
                    *x = 2.0 / (1.0 + exp_f32(-2.0 * *x)) - 1.0;
                }
            }
        });
    };
    ($t:ty, $kernel:path) => {
        impl_scalar!(@base $t, $kernel, {});
    };
    (@base $t:ty, $kernel:path, { $($extra:item)* }) => {
        impl Scalar for $t {
            #[inline]
            fn of(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            fn gemm(
                m: usize,
                k: usize,
                n: usize,
                a: &[Self],
                rsa: isize,
                csa: isize,
                b: &[Self],
                rsb: isize,
                csb: isize,
                c: &mut [Self],
                rsc: isize,
                csc: isize,
            ) {
                debug_assert!(extent(m, k, rsa, csa) <= a.len());
                debug_assert!(extent(k, n, rsb, csb) <= b.len());
                debug_assert!(extent(m, n, rsc, csc) <= c.len());
                if m == 0 || n == 0 {
                    return;
                }
                // SAFETY: the extents of all three operands were checked
                // against their slices above (debug) and every caller in this
                // crate derives strides from the slice shapes it owns.
                unsafe {
                    $kernel(
                        m,
                        k,
                        n,
                        1.0,
                        a.as_ptr(),
                        rsa,
                        csa,
                        b.as_ptr(),
                        rsb,
                        csb,
                        0.0,
                        c.as_mut_ptr(),
                        rsc,
                        csc,
                    );
                }
            }

            $($extra)*
        }
    };
}

impl_scalar!(f32, matrixmultiply::sgemm, fast);
impl_scalar!(f64, matrixmultiply::dgemm);

/// Branch-free `exp` for `f32` lanes, within a few ulp over the clamped range.
/// Written so the slice loops below auto-vectorise.
#[inline(always)]
fn exp_f32(x: f32) -> f32 {
    const LOG2E: f32 = std::f32::consts::LOG2_E;
    const LN2_HI: f32 = 0.693_359_4;
    const LN2_LO: f32 = -2.121_944_4e-4;
    // adding and subtracting 1.5·2²³ rounds to the nearest integer
    const ROUND: f32 = 12_582_912.0;
    let x = x.max(-87.0).min(88.0);
    let shifted = x * LOG2E + ROUND;
    let n = shifted - ROUND;
    let r = x - n * LN2_HI - n * LN2_LO;
    let mut p = 1.987_569_1e-4_f32;
    p = p * r + 1.398_199_9e-3;
    p = p * r + 8.333_452e-3;
    p = p * r + 4.166_579_6e-2;
    p = p * r + 0.166_666_65;
    p = p * r + 0.5;
    let p = p * r * r + r + 1.0;
    let exponent = shifted.to_bits().wrapping_sub(ROUND.to_bits()).wrapping_add(127);
    let scale = f32::from_bits(exponent << 23);
    p * scale
}

fn extent(rows: usize, cols: usize, rs: isize, cs: isize) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    ((rows - 1) as isize * rs + (cols - 1) as isize * cs) as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gemm_matches_naive_product() {
        // a: 2x3, b: 3x2
        let a = [1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b = [7.0f64, 8.0, 9.0, 10.0, 11.0, 12.0];
        let mut c = [0.0f64; 4];
        f64::gemm(2, 3, 2, &a, 3, 1, &b, 2, 1, &mut c, 2, 1);
        assert_eq!(c, [58.0, 64.0, 139.0, 154.0]);
    }

    #[test]
    fn gemm_with_transposed_rhs() {
        // b stored as 2x3 row-major, used as its transpose
        let a = [1.0f32, 2.0, 3.0];
        let bt = [1.0f32, 0.0, 1.0, 0.0, 1.0, 0.0];
        let mut c = [0.0f32; 2];
        f32::gemm(1, 3, 2, &a, 3, 1, &bt, 1, 3, &mut c, 2, 1);
        assert_eq!(c, [4.0, 2.0]);
    }

    #[test]
    fn fast_f32_activations_track_std() {
        let xs: Vec<f32> = (-2000..=2000).map(|i| i as f32 * 0.01).collect();
        let mut s = xs.clone();
        let mut t = xs.clone();
        f32::sigmoid_slice(&mut s);
        f32::tanh_slice(&mut t);
        for ((&x, &sv), &tv) in xs.iter().zip(&s).zip(&t) {
            let x = x as f64;
            assert!((sv as f64 - 1.0 / (1.0 + (-x).exp())).abs() < 1e-6, "sigmoid({x})");
            assert!((tv as f64 - x.tanh()).abs() < 1e-6, "tanh({x})");
        }
        let mut big = [-200.0f32, 200.0];
        f32::sigmoid_slice(&mut big);
        assert!(big[0] >= 0.0 && big[0] < 1e-30);
        assert_eq!(big[1], 1.0);
    }

    #[test]
    fn sigmoid_of_zero_is_half() {
        assert_eq!(0.0f64.sigmoid(), 0.5);
    }
}
