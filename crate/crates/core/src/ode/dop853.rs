use std::marker::PhantomData;

use num_complex::Complex;
use num_traits::Zero;

use super::{sk, Controller, Interp, Scheme, State, Tolerances};
use crate::scalar::{lit, Real};

/// Dormand-Prince 8(5,3) pair with its seventh-order continuous extension.
pub struct Dop853<T> {
    k: [State<T>; 17],
    tmp: State<T>,
    evals: usize,
    _t: PhantomData<T>,
}

// stage slots: k[1]..k[12] are the main stages, k[13] = f(t + h, y_new),
// k[14..=16] are the extra dense-output stages
const NEXT: usize = 13;

fn stage<T: Real>(out: &mut [Complex<T>], y: &[Complex<T>], h: T, k: &[State<T>; 17], terms: &[(usize, f64)]) {
    for i in 0..out.len() {
        let mut acc = Complex::zero();
        for &(j, a) in terms {
            acc = acc + k[j][i] * lit::<T>(a);
        }
        out[i] = y[i] + acc * h;
    }
}

fn combo<T: Real>(k: &[State<T>; 17], i: usize, terms: &[(usize, f64)]) -> Complex<T> {
    let mut acc = Complex::zero();
    for &(j, a) in terms {
        acc = acc + k[j][i] * lit::<T>(a);
    }
    acc
}

impl<T: Real> Scheme<T> for Dop853<T> {
    const ORDER: i32 = 8;
    const CONTROLLER: Controller = Controller {
        expo1: 1.0 / 8.0,
        beta: 0.0,
        safe: 0.9,
        facc1: 1.0 / 0.333,
        facc2: 1.0 / 6.0,
    };

    fn new(dim: usize) -> Self {
        Dop853 {
            k: std::array::from_fn(|_| vec![Complex::zero(); dim]),
            tmp: vec![Complex::zero(); dim],
            evals: 0,
            _t: PhantomData,
        }
    }

    fn attempt<F>(&mut self, f: &mut F, t: T, y: &[Complex<T>], k1: &[Complex<T>], h: T, y_new: &mut [Complex<T>], tol: &Tolerances<T>) -> T
    where
        F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    {
        self.k[1].copy_from_slice(k1);
        let rows: [(usize, f64, &[(usize, f64)]); 11] = [
            (2, C2, &[(1, A21)]),
            (3, C3, &[(1, A31), (2, A32)]),
            (4, C4, &[(1, A41), (3, A43)]),
            (5, C5, &[(1, A51), (3, A53), (4, A54)]),
            (6, C6, &[(1, A61), (4, A64), (5, A65)]),
            (7, C7, &[(1, A71), (4, A74), (5, A75), (6, A76)]),
            (8, C8, &[(1, A81), (4, A84), (5, A85), (6, A86), (7, A87)]),
            (9, C9, &[(1, A91), (4, A94), (5, A95), (6, A96), (7, A97), (8, A98)]),
            (10, C10, &[(1, A101), (4, A104), (5, A105), (6, A106), (7, A107), (8, A108), (9, A109)]),
            (11, C11, &[(1, A111), (4, A114), (5, A115), (6, A116), (7, A117), (8, A118), (9, A119), (10, A1110)]),
            (12, 1.0, &[(1, A121), (4, A124), (5, A125), (6, A126), (7, A127), (8, A128), (9, A129), (10, A1210), (11, A1211)]),
        ];
        for (slot, c, terms) in rows {
            stage(&mut self.tmp, y, h, &self.k, terms);
            f(t + h * lit(c), &self.tmp, &mut self.k[slot]);
        }
        self.evals += 11;

        let weights = [(1, B1), (6, B6), (7, B7), (8, B8), (9, B9), (10, B10), (11, B11), (12, B12)];
        let errw = [(1, ER1), (6, ER6), (7, ER7), (8, ER8), (9, ER9), (10, ER10), (11, ER11), (12, ER12)];
        let mut err = T::zero();
        let mut err2 = T::zero();
        for i in 0..y.len() {
            let incr = combo(&self.k, i, &weights);
            y_new[i] = y[i] + incr * h;
            let e2 = incr - combo(&self.k, i, &[(1, BHH1), (9, BHH2), (12, BHH3)]);
            let e = combo(&self.k, i, &errw);
            let s_re = sk(tol, y[i].re, y_new[i].re);
            let s_im = sk(tol, y[i].im, y_new[i].im);
            err2 += (e2.re / s_re).powi(2) + (e2.im / s_im).powi(2);
            err += (e.re / s_re).powi(2) + (e.im / s_im).powi(2);
        }
        let mut deno = err + err2 * lit(0.01);
        if deno <= T::zero() {
            deno = T::one();
        }
        h.abs() * err * (T::one() / (deno * lit(2.0 * y.len() as f64))).sqrt()
    }

    fn accept<F>(&mut self, f: &mut F, t: T, y: &[Complex<T>], k1: &[Complex<T>], h: T, y_new: &[Complex<T>], k_next: &mut [Complex<T>]) -> Interp<T>
    where
        F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    {
        let n = y.len();
        self.k[1].copy_from_slice(k1);
        f(t + h, y_new, &mut self.k[NEXT]);
        k_next.copy_from_slice(&self.k[NEXT]);

        let extra: [(usize, f64, &[(usize, f64)]); 3] = [
            (14, C14, &[(1, A141), (7, A147), (8, A148), (9, A149), (10, A1410), (11, A1411), (12, A1412), (NEXT, A1413)]),
            (15, C15, &[(1, A151), (6, A156), (7, A157), (8, A158), (11, A1511), (12, A1512), (NEXT, A1513), (14, A1514)]),
            (16, C16, &[(1, A161), (6, A166), (7, A167), (8, A168), (9, A169), (NEXT, A1613), (14, A1614), (15, A1615)]),
        ];
        for (slot, c, terms) in extra {
            stage(&mut self.tmp, y, h, &self.k, terms);
            f(t + h * lit(c), &self.tmp, &mut self.k[slot]);
        }
        self.evals += 4;

        let d: [[(usize, f64); 12]; 4] = [
            [(1, D41), (6, D46), (7, D47), (8, D48), (9, D49), (10, D410), (11, D411), (12, D412), (NEXT, D413), (14, D414), (15, D415), (16, D416)],
            [(1, D51), (6, D56), (7, D57), (8, D58), (9, D59), (10, D510), (11, D511), (12, D512), (NEXT, D513), (14, D514), (15, D515), (16, D516)],
            [(1, D61), (6, D66), (7, D67), (8, D68), (9, D69), (10, D610), (11, D611), (12, D612), (NEXT, D613), (14, D614), (15, D615), (16, D616)],
            [(1, D71), (6, D76), (7, D77), (8, D78), (9, D79), (10, D710), (11, D711), (12, D712), (NEXT, D713), (14, D714), (15, D715), (16, D716)],
        ];
        let mut cont: [State<T>; 8] = std::array::from_fn(|_| vec![Complex::zero(); n]);
        for i in 0..n {
            let ydiff = y_new[i] - y[i];
            let bspl = self.k[1][i] * h - ydiff;
            cont[0][i] = y[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - self.k[NEXT][i] * h - bspl;
            for (r, row) in d.iter().enumerate() {
                cont[4 + r][i] = combo(&self.k, i, row) * h;
            }
        }
        Interp::Septic(cont)
    }

    fn evals(&self) -> usize {
        self.evals
    }
}

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;
const A141: f64 = 5.61675022830479523392909219681E-2;
const A147: f64 = 2.53500210216624811088794765333E-1;
const A148: f64 = -2.46239037470802489917441475441E-1;
const A149: f64 = -1.24191423263816360469010140626E-1;
const A1410: f64 = 1.5329179827876569731206322685E-1;
const A1411: f64 = 8.20105229563468988491666602057E-3;
const A1412: f64 = 7.56789766054569976138603589584E-3;
const A1413: f64 = -8.298E-3;
const A151: f64 = 3.18346481635021405060768473261E-2;
const A156: f64 = 2.83009096723667755288322961402E-2;
const A157: f64 = 5.35419883074385676223797384372E-2;
const A158: f64 = -5.49237485713909884646569340306E-2;
const A1511: f64 = -1.08347328697249322858509316994E-4;
const A1512: f64 = 3.82571090835658412954920192323E-4;
const A1513: f64 = -3.40465008687404560802977114492E-4;
const A1514: f64 = 1.41312443674632500278074618366E-1;
const A161: f64 = -4.28896301583791923408573538692E-1;
const A166: f64 = -4.69762141536116384314449447206E0;
const A167: f64 = 7.68342119606259904184240953878E0;
const A168: f64 = 4.06898981839711007970213554331E0;
const A169: f64 = 3.56727187455281109270669543021E-1;
const A1613: f64 = -1.39902416515901462129418009734E-3;
const A1614: f64 = 2.9475147891527723389556272149E0;
const A1615: f64 = -9.15095847217987001081870187138E0;
const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;
const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;
const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;
const C14: f64 = 0.1E+00;
const C15: f64 = 0.2E+00;
const C16: f64 = 0.777777777777777777777777777778E+00;
const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;
const D41: f64 = -0.84289382761090128651353491142E+01;
const D46: f64 = 0.56671495351937776962531783590E+00;
const D47: f64 = -0.30689499459498916912797304727E+01;
const D48: f64 = 0.23846676565120698287728149680E+01;
const D49: f64 = 0.21170345824450282767155149946E+01;
const D410: f64 = -0.87139158377797299206789907490E+00;
const D411: f64 = 0.22404374302607882758541771650E+01;
const D412: f64 = 0.63157877876946881815570249290E+00;
const D413: f64 = -0.88990336451333310820698117400E-01;
const D414: f64 = 0.18148505520854727256656404962E+02;
const D415: f64 = -0.91946323924783554000451984436E+01;
const D416: f64 = -0.44360363875948939664310572000E+01;
const D51: f64 = 0.10427508642579134603413151009E+02;
const D56: f64 = 0.24228349177525818288430175319E+03;
const D57: f64 = 0.16520045171727028198505394887E+03;
const D58: f64 = -0.37454675472269020279518312152E+03;
const D59: f64 = -0.22113666853125306036270938578E+02;
const D510: f64 = 0.77334326684722638389603898808E+01;
const D511: f64 = -0.30674084731089398182061213626E+02;
const D512: f64 = -0.93321305264302278729567221706E+01;
const D513: f64 = 0.15697238121770843886131091075E+02;
const D514: f64 = -0.31139403219565177677282850411E+02;
const D515: f64 = -0.93529243588444783865713862664E+01;
const D516: f64 = 0.35816841486394083752465898540E+02;
const D61: f64 = 0.19985053242002433820987653617E+02;
const D66: f64 = -0.38703730874935176555105901742E+03;
const D67: f64 = -0.18917813819516756882830838328E+03;
const D68: f64 = 0.52780815920542364900561016686E+03;
const D69: f64 = -0.11573902539959630126141871134E+02;
const D610: f64 = 0.68812326946963000169666922661E+01;
const D611: f64 = -0.10006050966910838403183860980E+01;
const D612: f64 = 0.77771377980534432092869265740E+00;
const D613: f64 = -0.27782057523535084065932004339E+01;
const D614: f64 = -0.60196695231264120758267380846E+02;
const D615: f64 = 0.84320405506677161018159903784E+02;
const D616: f64 = 0.11992291136182789328035130030E+02;
const D71: f64 = -0.25693933462703749003312586129E+02;
const D76: f64 = -0.15418974869023643374053993627E+03;
const D77: f64 = -0.23152937917604549567536039109E+03;
const D78: f64 = 0.35763911791061412378285349910E+03;
const D79: f64 = 0.93405324183624310003907691704E+02;
const D710: f64 = -0.37458323136451633156875139351E+02;
const D711: f64 = 0.10409964950896230045147246184E+03;
const D712: f64 = 0.29840293426660503123344363579E+02;
const D713: f64 = -0.43533456590011143754432175058E+02;
const D714: f64 = 0.96324553959188282948394950600E+02;
const D715: f64 = -0.39177261675615439165231486172E+02;
const D716: f64 = -0.14972683625798562581422125276E+03;
