/// Root of a strictly increasing `f` on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
///
/// Halves the bracket until the midpoint coincides with an endpoint, so the
/// result is accurate to the last representable bit of the bracket.
pub fn bisect_increasing(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if f(hi).abs() < f(lo).abs() {
        hi
    } else {
        lo
    }
}
