use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::operator::BlockOperator;
use super::space::ModelSpace;

fn entry<R: Rng + ?Sized>(rng: &mut R, density: f64) -> Complex64 {
    if rng.gen::<f64>() < density {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Dense random operator; each entry is nonzero with probability `density`,
/// with real and imaginary parts uniform on `[-1, 1)`.
pub fn random_operator<R: Rng + ?Sized>(space: &ModelSpace, density: f64, rng: &mut R) -> BlockOperator {
    let n = space.dim();
    let mat = DMatrix::from_fn(n, n, |_, _| entry(rng, density));
    BlockOperator::from_matrix(space, mat).expect("square of the space dimension")
}

/// Random operator leaving every `N_t` invariant: entries only carry a cell
/// to itself or an earlier cell.
pub fn random_nest_operator<R: Rng + ?Sized>(space: &ModelSpace, density: f64, rng: &mut R) -> BlockOperator {
    let n = space.dim();
    let mat = DMatrix::from_fn(n, n, |r, c| {
        if space.site(r).cell <= space.site(c).cell {
            entry(rng, density)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    BlockOperator::from_matrix(space, mat).expect("square of the space dimension")
}

/// Random nest operator that is also block upper-triangular within each
/// cell (`E_a X E_b = 0` for `a > b` on within-cell entries).
pub fn random_upper_triangular<R: Rng + ?Sized>(space: &ModelSpace, density: f64, rng: &mut R) -> BlockOperator {
    let n = space.dim();
    let mat = DMatrix::from_fn(n, n, |r, c| {
        let (to, from) = (space.site(r), space.site(c));
        if to.cell < from.cell || (to.cell == from.cell && to.block <= from.block) {
            entry(rng, density)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    BlockOperator::from_matrix(space, mat).expect("square of the space dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn nest_operators_have_no_defect() {
        let sp = ModelSpace::new(4, 2, 2).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        assert_eq!(random_nest_operator(&sp, 1.0, &mut rng).nest_defect(), 0.0);
        assert_eq!(random_upper_triangular(&sp, 1.0, &mut rng).nest_defect(), 0.0);
        assert!(random_operator(&sp, 1.0, &mut rng).nest_defect() > 0.0);
    }
}
