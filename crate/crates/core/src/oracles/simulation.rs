use super::{OracleError, OracleResult};
use crate::topology::{Boundary, CellRef, GridSpec};

fn advance(pos: isize, vel: &mut isize, len: isize, wrap: bool) -> isize {
    let next = pos + *vel;
    if wrap {
        return next.rem_euclid(len);
    }
    if (0..len).contains(&next) {
        return next;
    }
    *vel = -*vel;
    let back = pos + *vel;
    if (0..len).contains(&back) {
        back
    } else {
        pos
    }
}

/// Position after `n` steps of a point moving with `velocity`. The major
/// axis always reflects; the minor axis wraps only on a wrapping grid.
pub fn simulate_bouncing_point(spec: &GridSpec, start: CellRef, velocity: (isize, isize), n: usize) -> OracleResult<CellRef> {
    spec.check(start)?;
    if velocity.0.abs() > 1 || velocity.1.abs() > 1 {
        return Err(OracleError::Precondition(format!("velocity {velocity:?} exceeds one cell per step")));
    }
    let (mut vr, mut vc) = velocity;
    let (mut r, mut c) = (start.major as isize, start.minor as isize);
    let wrap = spec.boundary == Boundary::Wrapping;
    for _ in 0..n {
        r = advance(r, &mut vr, spec.major as isize, false);
        c = advance(c, &mut vc, spec.minor as isize, wrap);
    }
    Ok(CellRef::new(r as usize, c as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps() {
        let spec = GridSpec::cartesian(3, 3, Boundary::Bounded);
        assert_eq!(simulate_bouncing_point(&spec, CellRef::new(2, 1), (1, 1), 0).unwrap(), CellRef::new(2, 1));
    }

    #[test]
    fn angular_wrap() {
        let spec = GridSpec::polar(3, 8, Boundary::Wrapping);
        assert_eq!(simulate_bouncing_point(&spec, CellRef::new(1, 5), (0, 1), 7).unwrap(), CellRef::new(1, 4));
    }

    #[test]
    fn radial_reflection() {
        let spec = GridSpec::polar(3, 4, Boundary::Wrapping);
        assert_eq!(simulate_bouncing_point(&spec, CellRef::new(1, 0), (1, 0), 3).unwrap(), CellRef::new(0, 0));
    }

    #[test]
    fn bounded_minor_reflects() {
        let spec = GridSpec::cartesian(1, 4, Boundary::Bounded);
        // 2 -> 3 -> 2 -> 1 -> 0 -> 1
        assert_eq!(simulate_bouncing_point(&spec, CellRef::new(0, 2), (0, 1), 5).unwrap(), CellRef::new(0, 1));
        // a single-cell axis cannot move at all
        let thin = GridSpec::cartesian(1, 1, Boundary::Bounded);
        assert_eq!(simulate_bouncing_point(&thin, CellRef::new(0, 0), (1, 1), 9).unwrap(), CellRef::new(0, 0));
    }
}
