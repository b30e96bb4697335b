//! Adaptive integration rules: Gauss–Kronrod (7, 15) on intervals and
//! tensor Gauss–Legendre 8-point cubature on boxes of dimension 1 to 3.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_804_939_476_142_360_184,
    0.525_532_409_916_328_985_817_739_049_189_246,
    0.796_666_477_413_626_739_591_553_936_475_831,
    0.960_289_856_497_536_231_683_560_868_569_473,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_361_982_965_150_449_277_196,
    0.313_706_645_877_887_287_337_962_201_986_601,
    0.222_381_034_453_374_470_544_355_994_426_241,
    0.101_228_536_290_376_259_152_531_354_309_962,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub cells: usize,
    pub converged: bool,
}

/// Interval or box awaiting refinement, ordered by error.
struct Pending<C> {
    cell: C,
    value: f64,
    error: f64,
    id: usize,
}

impl<C> PartialEq for Pending<C> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<C> Eq for Pending<C> {}
impl<C> PartialOrd for Pending<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C> Ord for Pending<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Sums the pending cells in creation order so results do not depend on heap layout.
fn settle<C>(heap: BinaryHeap<Pending<C>>) -> (f64, f64) {
    let mut cells = heap.into_vec();
    cells.sort_unstable_by_key(|c| c.id);
    cells.iter().fold((0.0, 0.0), |(v, e), c| (v + c.value, e + c.error))
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WEIGHTS_K[7];
    let mut g = fc * GK_WEIGHTS_G[3];
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let s = f(c - dx) + f(c + dx);
        k += GK_WEIGHTS_K[i] * s;
        if i % 2 == 1 {
            g += GK_WEIGHTS_G[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`, starting from the
/// partition given by `breaks` (interior points outside `(a, b)` are ignored).
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_1d<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Quad {
    if !(b > a) {
        return Quad { value: 0.0, error: 0.0, cells: 0, converged: true };
    }
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_unstable_by(f64::total_cmp);
    pts.dedup();

    let mut heap = BinaryHeap::new();
    let mut next_id = 0;
    let (mut total, mut err) = (0.0, 0.0);
    for w in pts.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Pending { cell: (w[0], w[1]), value: v, error: e, id: next_id });
        next_id += 1;
    }
    let mut cells = heap.len();
    loop {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            let (value, error) = settle(heap);
            return Quad { value, error, cells, converged: true };
        }
        if cells >= max_intervals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let (lo, hi) = worst.cell;
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // Interval below floating-point resolution; keep it as is.
            heap.push(Pending { error: 0.0, ..worst });
            err -= worst.error;
            continue;
        }
        total -= worst.value;
        err -= worst.error;
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (v, e) = gk15(&mut f, l, h);
            total += v;
            err += e;
            heap.push(Pending { cell: (l, h), value: v, error: e, id: next_id });
            next_id += 1;
        }
        cells += 1;
    }
    let (value, error) = settle(heap);
    Quad { value, error, cells, converged: false }
}

fn gl8_box<const D: usize, F: FnMut([f64; D]) -> f64>(f: &mut F, lo: [f64; D], hi: [f64; D]) -> f64 {
    let mut nodes = [0.0; 8];
    let mut weights = [0.0; 8];
    for k in 0..4 {
        nodes[k] = -GL8_NODES[3 - k];
        nodes[7 - k] = GL8_NODES[3 - k];
        weights[k] = GL8_WEIGHTS[3 - k];
        weights[7 - k] = GL8_WEIGHTS[3 - k];
    }
    let mut c = [0.0; D];
    let mut h = [0.0; D];
    let mut jac = 1.0;
    for d in 0..D {
        c[d] = 0.5 * (lo[d] + hi[d]);
        h[d] = 0.5 * (hi[d] - lo[d]);
        jac *= h[d];
    }
    let total = 8usize.pow(D as u32);
    let mut sum = 0.0;
    let mut x = [0.0; D];
    for flat in 0..total {
        let mut rest = flat;
        let mut w = 1.0;
        for d in 0..D {
            let k = rest % 8;
            rest /= 8;
            x[d] = c[d] + h[d] * nodes[k];
            w *= weights[k];
        }
        sum += w * f(x);
    }
    sum * jac
}

fn children<const D: usize>(lo: [f64; D], hi: [f64; D]) -> impl Iterator<Item = ([f64; D], [f64; D])> {
    (0..(1usize << D)).map(move |mask| {
        let mut l = lo;
        let mut h = hi;
        for d in 0..D {
            let mid = 0.5 * (lo[d] + hi[d]);
            if mask & (1 << d) == 0 {
                h[d] = mid;
            } else {
                l[d] = mid;
            }
        }
        (l, h)
    })
}

/// Adaptive tensor Gauss–Legendre cubature over a box.
///
/// `edges[d]` is the initial mesh along axis `d` (sorted, including both
/// endpoints). Each cell carries the 8-point estimate on itself and on its
/// `2^D` children; their difference is the local error estimate, and the
/// cell with the largest error is bisected along every axis until the summed
/// error meets the tolerance or `max_cells` is exhausted.
pub fn integrate_box<const D: usize, F: FnMut([f64; D]) -> f64>(
    mut f: F,
    edges: &[Vec<f64>; D],
    rel_tol: f64,
    abs_tol: f64,
    max_cells: usize,
) -> Quad {
    let mut heap: BinaryHeap<Pending<([f64; D], [f64; D])>> = BinaryHeap::new();
    let mut next_id = 0;
    let (mut total, mut err) = (0.0, 0.0);

    let counts: [usize; D] = core::array::from_fn(|d| edges[d].len().saturating_sub(1));
    let n_base: usize = counts.iter().product();
    for flat in 0..n_base {
        let mut rest = flat;
        let mut lo = [0.0; D];
        let mut hi = [0.0; D];
        for d in 0..D {
            let k = rest % counts[d];
            rest /= counts[d];
            lo[d] = edges[d][k];
            hi[d] = edges[d][k + 1];
        }
        let coarse = gl8_box(&mut f, lo, hi);
        let fine: f64 = children(lo, hi).map(|(l, h)| gl8_box(&mut f, l, h)).sum();
        let e = (coarse - fine).abs();
        total += fine;
        err += e;
        heap.push(Pending { cell: (lo, hi), value: fine, error: e, id: next_id });
        next_id += 1;
    }

    let mut cells = n_base;
    let converged = loop {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break true;
        }
        if cells + (1 << D) > max_cells {
            break false;
        }
        let Some(worst) = heap.pop() else { break true };
        total -= worst.value;
        err -= worst.error;
        let (lo, hi) = worst.cell;
        for (l, h) in children(lo, hi) {
            let coarse = gl8_box(&mut f, l, h);
            let fine: f64 = children(l, h).map(|(ll, hh)| gl8_box(&mut f, ll, hh)).sum();
            let e = (coarse - fine).abs();
            total += fine;
            err += e;
            heap.push(Pending { cell: (l, h), value: fine, error: e, id: next_id });
            next_id += 1;
        }
        cells += (1 << D) - 1;
    };
    let (value, error) = settle(heap);
    Quad { value, error, cells, converged }
}

/// `n + 1` mesh points on `[0, len]` graded quadratically towards 0.
pub fn graded_edges(len: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let t = k as f64 / n as f64;
            len * t * t
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn gk_integrates_smooth_functions() {
        let q = integrate_1d(|x| x.exp(), 0.0, 1.0, &[], 1e-14, 0.0, 100);
        assert!(q.converged);
        assert_relative_eq!(q.value, core::f64::consts::E - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn gk_handles_breakpoints_and_kinks() {
        let q = integrate_1d(|x| (x - 0.3).abs(), 0.0, 1.0, &[0.3], 1e-14, 0.0, 100);
        assert_relative_eq!(q.value, 0.5 * (0.09 + 0.49), max_relative = 1e-14);
        let q = integrate_1d(|x| if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, &[], 1e-10, 1e-13, 10_000);
        assert!((q.value - 0.3).abs() < 1e-9);
    }

    #[test]
    fn gl8_is_exact_for_degree_15() {
        let edges = [vec![0.0, 2.0]];
        let q = integrate_box::<1, _>(|x| x[0].powi(15), &edges, 1e-15, 0.0, 10);
        assert_relative_eq!(q.value, 2f64.powi(16) / 16.0, max_relative = 1e-13);
    }

    #[test]
    fn cubature_2d_and_3d() {
        let e = [vec![0.0, 0.5, 1.0], vec![0.0, 1.0]];
        let q = integrate_box::<2, _>(|x| (x[0] + x[1]).sin(), &e, 1e-12, 0.0, 10_000);
        let exact = 2.0 * 1.0f64.sin() - 2.0f64.sin();
        assert_relative_eq!(q.value, exact, max_relative = 1e-12);

        let e = [vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]];
        let q = integrate_box::<3, _>(|x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp(), &e, 1e-10, 0.0, 10_000);
        let one = 0.746_824_132_812_427_025_399_467_436_131_664_f64;
        assert_relative_eq!(q.value, one * one * one, max_relative = 1e-10);
    }

    #[test]
    fn cubature_refines_around_a_curved_kink() {
        // Second-derivative jump across the unit circle, like the disk∩square areas.
        let e = [graded_edges(1.0, 8), graded_edges(1.0, 8)];
        let q = integrate_box::<2, _>(|x| (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0).powi(2), &e, 1e-9, 0.0, 400_000);
        assert!(q.converged);
        assert_relative_eq!(q.value, core::f64::consts::PI / 12.0, max_relative = 1e-8);
    }
}
