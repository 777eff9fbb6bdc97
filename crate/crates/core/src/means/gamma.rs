/// Parameter region of the two-exponent family `u_{a,b}` on which it is a
/// normalized operator monotone function.
///
/// The region is the union of
/// * the strip `0 < a - b <= 1`, `-1 <= a <= 2`, `-2 <= b <= 1`,
/// * the box `[0, 1] x [-1, 0]` without the origin,
/// * the diagonal `a = b != 0`,
///
/// all inside `[-2, 2]^2`. Inequalities are used exactly as written.
pub fn gamma_contains(a: f64, b: f64) -> bool {
    if !a.is_finite() || !b.is_finite() || a.abs() > 2.0 || b.abs() > 2.0 {
        return false;
    }
    let d = a - b;
    let strip = d > 0.0 && d <= 1.0 && (-1.0..=2.0).contains(&a) && (-2.0..=1.0).contains(&b);
    let unit_box = (0.0..=1.0).contains(&a) && (-1.0..=0.0).contains(&b) && !(a == 0.0 && b == 0.0);
    let diagonal = a == b && a != 0.0;
    strip || unit_box || diagonal
}
