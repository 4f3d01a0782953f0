use crate::error::NewtonError;
use crate::matrix::IntervalMatrix;
use crate::vector::IntervalVector;

/// One step of the interval Newton operator
/// `N(x, y0, Y) = y0 - [df/dy(x, Y)]^{-1} f(x, y0)`.
///
/// `f(x, y)` must enclose the function over the boxes given; `dfy(x, Y)`
/// must enclose its `y`-Jacobian. On success the returned box (a subset of
/// `ybox`) contains the unique zero `y(x)` for every `x` in the box.
pub fn interval_newton<F, J>(
    f: F,
    dfy: J,
    x: &IntervalVector,
    y0: &[f64],
    ybox: &IntervalVector,
) -> Result<IntervalVector, NewtonError>
where
    F: Fn(&IntervalVector, &IntervalVector) -> IntervalVector,
    J: Fn(&IntervalVector, &IntervalVector) -> IntervalMatrix,
{
    if !ybox.contains_point(y0) {
        return Err(NewtonError::NoContraction);
    }
    // A component bounded away from zero over Y rules out any root.
    if f(x, ybox).iter().any(|c| !c.contains_zero()) {
        return Err(NewtonError::NoContraction);
    }
    let inv = dfy(x, ybox)
        .inverse()
        .map_err(|_| NewtonError::SingularJacobian)?;
    let center = IntervalVector::from_points(y0);
    let n = &center - &inv.mul_vec(&f(x, &center));
    if !n.subset(ybox) {
        return Err(NewtonError::NoContraction);
    }
    Ok(n.intersection(ybox).unwrap_or(n))
}

/// Repeats [`interval_newton`] from the midpoint of the current enclosure
/// until the width stops shrinking or `max_iter` steps were taken.
pub fn interval_newton_refine<F, J>(
    f: F,
    dfy: J,
    x: &IntervalVector,
    ybox: &IntervalVector,
    max_iter: usize,
) -> Result<IntervalVector, NewtonError>
where
    F: Fn(&IntervalVector, &IntervalVector) -> IntervalVector,
    J: Fn(&IntervalVector, &IntervalVector) -> IntervalMatrix,
{
    let mut y = interval_newton(&f, &dfy, x, &ybox.mid(), ybox)?;
    for _ in 1..max_iter {
        match interval_newton(&f, &dfy, x, &y.mid(), &y) {
            Ok(next) if next.max_width() < y.max_width() => y = next,
            _ => break,
        }
    }
    Ok(y)
}
