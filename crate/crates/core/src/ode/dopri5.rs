use std::marker::PhantomData;

use num_complex::Complex;
use num_traits::Zero;

use super::{sk, Controller, Interp, Scheme, State, Tolerances};
use crate::scalar::{lit, Real};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Dormand-Prince 5(4) pair with Shampine's quartic dense output.
pub struct Dopri5<T> {
    k2: State<T>,
    k3: State<T>,
    k4: State<T>,
    k5: State<T>,
    k6: State<T>,
    tmp: State<T>,
    evals: usize,
    _t: PhantomData<T>,
}

fn stage<T: Real>(out: &mut [Complex<T>], y: &[Complex<T>], h: T, terms: &[(f64, &[Complex<T>])]) {
    for i in 0..out.len() {
        let mut acc = Complex::zero();
        for (a, k) in terms {
            acc = acc + k[i] * lit::<T>(*a);
        }
        out[i] = y[i] + acc * h;
    }
}

impl<T: Real> Scheme<T> for Dopri5<T> {
    const ORDER: i32 = 5;
    const CONTROLLER: Controller = Controller {
        expo1: 0.2 - 0.04 * 0.75,
        beta: 0.04,
        safe: 0.9,
        facc1: 1.0 / 0.2,
        facc2: 1.0 / 10.0,
    };

    fn new(dim: usize) -> Self {
        let z = vec![Complex::zero(); dim];
        Dopri5 {
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            k5: z.clone(),
            k6: z.clone(),
            tmp: z,
            evals: 0,
            _t: PhantomData,
        }
    }

    fn attempt<F>(&mut self, f: &mut F, t: T, y: &[Complex<T>], k1: &[Complex<T>], h: T, y_new: &mut [Complex<T>], tol: &Tolerances<T>) -> T
    where
        F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    {
        stage(&mut self.tmp, y, h, &[(A21, k1)]);
        f(t + h * lit(C2), &self.tmp, &mut self.k2);
        stage(&mut self.tmp, y, h, &[(A31, k1), (A32, &self.k2)]);
        f(t + h * lit(C3), &self.tmp, &mut self.k3);
        stage(&mut self.tmp, y, h, &[(A41, k1), (A42, &self.k2), (A43, &self.k3)]);
        f(t + h * lit(C4), &self.tmp, &mut self.k4);
        stage(&mut self.tmp, y, h, &[(A51, k1), (A52, &self.k2), (A53, &self.k3), (A54, &self.k4)]);
        f(t + h * lit(C5), &self.tmp, &mut self.k5);
        stage(&mut self.tmp, y, h, &[(A61, k1), (A62, &self.k2), (A63, &self.k3), (A64, &self.k4), (A65, &self.k5)]);
        f(t + h, &self.tmp, &mut self.k6);
        stage(y_new, y, h, &[(A71, k1), (A73, &self.k3), (A74, &self.k4), (A75, &self.k5), (A76, &self.k6)]);
        // k7 = f(t + h, y_new) is the FSAL stage; it goes into k2's slot
        f(t + h, y_new, &mut self.k2);
        self.evals += 6;

        let mut err = T::zero();
        for i in 0..y.len() {
            let e = (k1[i] * lit::<T>(E1)
                + self.k3[i] * lit::<T>(E3)
                + self.k4[i] * lit::<T>(E4)
                + self.k5[i] * lit::<T>(E5)
                + self.k6[i] * lit::<T>(E6)
                + self.k2[i] * lit::<T>(E7))
                * h;
            err += (e.re / sk(tol, y[i].re, y_new[i].re)).powi(2);
            err += (e.im / sk(tol, y[i].im, y_new[i].im)).powi(2);
        }
        (err / lit(2.0 * y.len() as f64)).sqrt()
    }

    fn accept<F>(&mut self, _f: &mut F, _t: T, y: &[Complex<T>], k1: &[Complex<T>], h: T, y_new: &[Complex<T>], k_next: &mut [Complex<T>]) -> Interp<T>
    where
        F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    {
        let n = y.len();
        let k7 = &self.k2;
        let mut r = [vec![Complex::zero(); n], vec![Complex::zero(); n], vec![Complex::zero(); n], vec![Complex::zero(); n], vec![Complex::zero(); n]];
        for i in 0..n {
            let ydiff = y_new[i] - y[i];
            let bspl = k1[i] * h - ydiff;
            r[0][i] = y[i];
            r[1][i] = ydiff;
            r[2][i] = bspl;
            r[3][i] = ydiff - k7[i] * h - bspl;
            r[4][i] = (k1[i] * lit::<T>(D1)
                + self.k3[i] * lit::<T>(D3)
                + self.k4[i] * lit::<T>(D4)
                + self.k5[i] * lit::<T>(D5)
                + self.k6[i] * lit::<T>(D6)
                + k7[i] * lit::<T>(D7))
                * h;
        }
        k_next.copy_from_slice(k7);
        Interp::Quartic(r)
    }

    fn evals(&self) -> usize {
        self.evals
    }
}
