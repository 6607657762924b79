//! Minimal radix-2 complex FFT used for circular cross-correlation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    fn mul(self, o: Complex) -> Complex {
        Complex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

/// In-place iterative FFT; `data.len()` must be a power of two.
pub(crate) fn fft(data: &mut [Complex], inverse: bool) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        let twiddles: Vec<Complex> = (0..half)
            .map(|k| Complex {
                re: (ang * k as f64).cos(),
                im: (ang * k as f64).sin(),
            })
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let u = data[start + k];
                let v = data[start + k + half].mul(twiddles[k]);
                data[start + k] = Complex {
                    re: u.re + v.re,
                    im: u.im + v.im,
                };
                data[start + k + half] = Complex {
                    re: u.re - v.re,
                    im: u.im - v.im,
                };
            }
        }
        len <<= 1;
    }
    if inverse {
        let scale = 1.0 / n as f64;
        for c in data.iter_mut() {
            c.re *= scale;
            c.im *= scale;
        }
    }
}

/// `out[k] = sum_i a[i] * b[(i + k) mod p]` for `k in 0..p`, `p = a.len() = b.len()`.
pub(crate) fn circular_xcorr(a: &[f64], b: &[f64]) -> Vec<f64> {
    let p = a.len();
    assert_eq!(p, b.len());
    if p == 0 {
        return Vec::new();
    }
    let n = (2 * p).next_power_of_two();
    let mut fa = vec![Complex::default(); n];
    let mut fb = vec![Complex::default(); n];
    for (dst, &x) in fa.iter_mut().zip(a) {
        dst.re = x;
    }
    for i in 0..(2 * p - 1) {
        fb[i].re = b[i % p];
    }
    fft(&mut fa, false);
    fft(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        // conj(A) * B
        let c = Complex {
            re: x.re,
            im: -x.im,
        };
        *x = c.mul(*y);
    }
    fft(&mut fa, true);
    fa.truncate(p);
    fa.into_iter().map(|c| c.re).collect()
}
