//! One-dimensional search helpers for smooth, low-dimensional objectives.

use crate::scalar::Real;

/// Inverse golden ratio, (√5 − 1)/2.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// Returns `(argmax, max)`. Stops when the bracket is narrower than `xtol`
/// or after `max_iter` shrinks. Kinks are fine; only unimodality matters.
pub fn golden_section_max<T, F>(f: F, lo: T, hi: T, xtol: T, max_iter: usize) -> (T, T)
where
    T: Real,
    F: Fn(T) -> T,
{
    let r = T::lit(INV_PHI);
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    // Keep the best of the interior points and the bracket ends.
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Coordinate-wise golden-section refinement around `x`, each coordinate
/// searched within `±radius` of its current value, `sweeps` times over.
pub fn refine_coordinates<T, F, const N: usize>(
    f: F,
    mut x: [T; N],
    radius: T,
    sweeps: usize,
    xtol: T,
) -> ([T; N], T)
where
    T: Real,
    F: Fn(&[T; N]) -> T,
{
    let mut best = f(&x);
    for _ in 0..sweeps {
        for i in 0..N {
            let centre = x[i];
            let (xi, v) = golden_section_max(
                |s| {
                    let mut y = x;
                    y[i] = s;
                    f(&y)
                },
                centre - radius,
                centre + radius,
                xtol,
                200,
            );
            if v >= best {
                x[i] = xi;
                best = v;
            }
        }
    }
    (x, best)
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace<T: Real>(start: T, stop: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let n = T::from_usize(count - 1).expect("count fits the scalar");
            (0..count)
                .map(|i| {
                    let i = T::from_usize(i).expect("index fits the scalar");
                    start + (stop - start) * i / n
                })
                .collect()
        }
    }
}
