//! Globally adaptive Gauss-Kronrod (7, 15) quadrature for complex integrands.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7)
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_PANELS: usize = 2000;

fn gk15<T, F>(f: &mut F, a: T, b: T) -> Result<(Complex<T>, T)>
where
    T: Real,
    F: FnMut(T) -> Result<Complex<T>>,
{
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let fc = f(mid)?;
    let mut kron = fc * lit::<T>(WGK[7]);
    let mut gauss = fc * lit::<T>(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let s = f(mid - dx)? + f(mid + dx)?;
        kron = kron + s * lit::<T>(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * lit::<T>(WG[j / 2]);
        }
    }
    let err = ((kron - gauss) * half).norm();
    Ok((kron * half, err))
}

/// `∫_a^b f`, refined until the estimated error is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, abs_tol: f64, rel_tol: f64) -> Result<Complex<T>>
where
    T: Real,
    F: FnMut(T) -> Result<Complex<T>>,
{
    if a == b {
        return Ok(Complex::zero());
    }
    let (i0, e0) = gk15(&mut f, a, b)?;
    let mut panels = vec![(a, b, i0, e0)];
    let mut total = i0;
    let mut err = e0;
    let floor = T::epsilon() * lit(50.0);
    while panels.len() < MAX_PANELS {
        if err <= lit::<T>(abs_tol).max(lit::<T>(rel_tol) * total.norm()) {
            return Ok(total);
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].3.partial_cmp(&panels[j].3).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty");
        let (pa, pb, pi, pe) = panels.swap_remove(worst);
        let pm = (pa + pb) * lit(0.5);
        if (pb - pa).abs() <= floor * (T::one() + pm.abs()) || !pe.is_finite() {
            panels.push((pa, pb, pi, pe));
            break;
        }
        let (il, el) = gk15(&mut f, pa, pm)?;
        let (ir, er) = gk15(&mut f, pm, pb)?;
        total = total - pi + il + ir;
        err = err - pe + el + er;
        panels.push((pa, pm, il, el));
        panels.push((pm, pb, ir, er));
        // re-sum occasionally so cancellation in the running error cannot hide work
        if panels.len() % 64 == 0 {
            err = panels.iter().fold(T::zero(), |acc, p| acc + p.3);
        }
    }
    err = panels.iter().fold(T::zero(), |acc, p| acc + p.3);
    if err <= lit::<T>(abs_tol).max(lit::<T>(rel_tol) * total.norm()) {
        return Ok(total);
    }
    Err(Error::QuadratureFailure { a: to_f64(a), b: to_f64(b) })
}
