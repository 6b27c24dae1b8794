//! Forward DFT of arbitrary length: iterative radix-2 for powers of two,
//! Bluestein's chirp-z otherwise. Plans are reusable across pixels.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2)
            .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))
            .collect();
        Self { n, twiddles }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..len / 2 {
                    let w = self.twiddles[k * step];
                    let u = buf[start + k];
                    let v = buf[start + k + len / 2] * w;
                    buf[start + k] = u + v;
                    buf[start + k + len / 2] = u - v;
                }
            }
            len <<= 1;
        }
    }

    fn inverse(&self, buf: &mut [Complex64]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v = v.conj() * scale;
        }
    }
}

#[derive(Debug, Clone)]
enum Plan {
    Radix2(Radix2),
    Bluestein {
        inner: Radix2,
        chirp: Vec<Complex64>,
        kernel_spectrum: Vec<Complex64>,
    },
}

/// Forward transform `X_k = Σ x_n e^{-2πikn/N}`.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    plan: Plan,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        if n.is_power_of_two() {
            return Self {
                n,
                plan: Plan::Radix2(Radix2::new(n)),
            };
        }
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // n² taken mod 2n keeps the chirp angle small
        let chirp: Vec<Complex64> = (0..n)
            .map(|i| {
                let q = ((i as u128 * i as u128) % (2 * n as u128)) as f64;
                Complex64::from_polar(1.0, -PI * q / n as f64)
            })
            .collect();
        let mut kernel = alloc::vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for i in 1..n {
            kernel[i] = chirp[i].conj();
            kernel[m - i] = chirp[i].conj();
        }
        inner.forward(&mut kernel);
        Self {
            n,
            plan: Plan::Bluestein {
                inner,
                chirp,
                kernel_spectrum: kernel,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Transforms `buf` (length `n`) in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        match &self.plan {
            Plan::Radix2(r) => r.forward(buf),
            Plan::Bluestein {
                inner,
                chirp,
                kernel_spectrum,
            } => {
                let m = inner.n;
                let mut work = alloc::vec![Complex64::new(0.0, 0.0); m];
                for ((w, &x), &c) in work.iter_mut().zip(buf.iter()).zip(chirp) {
                    *w = x * c;
                }
                inner.forward(&mut work);
                for (w, &k) in work.iter_mut().zip(kernel_spectrum) {
                    *w *= k;
                }
                inner.inverse(&mut work);
                for ((b, &w), &c) in buf.iter_mut().zip(&work).zip(chirp) {
                    *b = w * c;
                }
            }
        }
    }
}

/// Direct O(N²) DFT, the reference for [`Fft`].
pub fn dft_naive(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in x.iter().enumerate() {
                let q = ((k as u128 * j as u128) % n as u128) as f64;
                acc += Complex64::from_polar(v, -2.0 * PI * q / n as f64);
            }
            acc
        })
        .collect()
}
