//! Quadrature helpers: adaptive Gauss–Kronrod (7, 15) in one dimension and a
//! tensor-product Gauss–Legendre rule for boxes.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a, b]`.
///
/// Subdivides until the estimated error is below `max(abs_tol, rel_tol·|I|)`
/// or `max_intervals` panels have been used.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || panels.len() >= max_intervals {
            return total;
        }
        // split the worst panel
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            return total;
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Integral over an axis-aligned box. One-dimensional boxes use the adaptive
/// rule; higher dimensions use composite 8-point Gauss–Legendre panels.
pub fn integrate_box(f: impl Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64]) -> f64 {
    let d = lo.len();
    if d == 1 {
        return integrate(|x| f(&[x]), lo[0], hi[0], 1e-13, 1e-12, 4000);
    }
    let panels = if d == 2 { 32 } else { 6 };
    let per_axis = panels * 8;
    let axis_nodes: Vec<Vec<(f64, f64)>> = (0..d)
        .map(|k| {
            let h = (hi[k] - lo[k]) / panels as f64;
            let mut nodes = Vec::with_capacity(per_axis);
            for p in 0..panels {
                let c = lo[k] + (p as f64 + 0.5) * h;
                for j in 0..4 {
                    let dx = 0.5 * h * GL8_X[j];
                    let w = 0.5 * h * GL8_W[j];
                    nodes.push((c - dx, w));
                    nodes.push((c + dx, w));
                }
            }
            nodes
        })
        .collect();
    let mut idx = vec![0usize; d];
    let mut point = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for k in 0..d {
            let (x, wk) = axis_nodes[k][idx[k]];
            point[k] = x;
            w *= wk;
        }
        total += w * f(&point);
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == d {
                return total;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_mass() {
        let pi = std::f64::consts::PI;
        let v = integrate(
            |x| (-x * x).exp() / pi.sqrt(),
            -10.0,
            10.0,
            1e-14,
            1e-13,
            1000,
        );
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-9, 1e-9, 5000);
        assert!((v - 2.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn two_dimensional_box() {
        let v = integrate_box(|p| (p[0] * p[1]).cos(), &[0.0, 0.0], &[1.0, 2.0]);
        // ∫₀¹ sin(2x)/x dx
        let reference = integrate(
            |x| if x == 0.0 { 2.0 } else { (2.0 * x).sin() / x },
            0.0,
            1.0,
            1e-15,
            1e-14,
            100,
        );
        assert!((v - reference).abs() < 1e-12);
    }
}
