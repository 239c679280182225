//! Central-difference operators on periodic piecewise-constant fields.
//!
//! All per-cell operators include the finite-volume factor `|σ|/|K| = 1/h`,
//! so they are consistent difference quotients:
//!
//! * `div_h v = Σ_i (v_i[K+e_i] - v_i[K-e_i]) / 2h`
//! * `grad_h φ = ((φ[K+e_i] - φ[K-e_i]) / 2h)_i`
//! * `lap_compact φ = Σ_i (φ[K+e_i] - 2φ_K + φ[K-e_i]) / h²`
//! * `lap_wide = div_h ∘ grad_h`
//!
//! With this scaling the face diffusion `Σ_σ λ [φ]_{σ,K}` of the scheme is
//! `λ h lap_compact φ`.

mod dense;
mod field;

pub use dense::{dense_matrix, DenseMatrix, OperatorKind, DENSE_CELL_CAP};
pub use field::{ScalarField, VectorField};

use crate::grid::FaceRef;

/// `[φ]_{σ,K} = φ_L - φ_K` with `L` the outer cell of `face`.
#[inline]
pub fn face_jump(field: &ScalarField, face: FaceRef) -> f64 {
    let g = field.grid();
    field[g.outer(face)] - field[face.cell]
}

/// `{φ}_σ = (φ_L + φ_K) / 2`.
#[inline]
pub fn face_avg(field: &ScalarField, face: FaceRef) -> f64 {
    let g = field.grid();
    0.5 * (field[g.outer(face)] + field[face.cell])
}

/// Central difference along one axis, `(φ[K+e] - φ[K-e]) / 2h`.
pub fn partial(phi: &ScalarField, axis: usize) -> ScalarField {
    let g = *phi.grid();
    let two_h = 2.0 * g.h();
    let values =
        (0..g.cell_count()).map(|k| (phi[g.neighbor(k, axis, 1)] - phi[g.neighbor(k, axis, -1)]) / two_h).collect();
    ScalarField::from_values(&g, values).expect("same grid")
}

pub fn div_h(v: &VectorField) -> ScalarField {
    let g = *v.grid();
    let two_h = 2.0 * g.h();
    let values = (0..g.cell_count())
        .map(|k| {
            let mut acc = 0.0;
            for (axis, c) in v.comps().iter().enumerate() {
                acc += (c[g.neighbor(k, axis, 1)] - c[g.neighbor(k, axis, -1)]) / two_h;
            }
            acc
        })
        .collect();
    ScalarField::from_values(&g, values).expect("same grid")
}

pub fn grad_h(phi: &ScalarField) -> VectorField {
    let g = *phi.grid();
    let comps = (0..g.dim()).map(|axis| partial(phi, axis)).collect();
    VectorField::from_components(&g, comps).expect("same grid")
}

pub fn lap_compact(phi: &ScalarField) -> ScalarField {
    let g = *phi.grid();
    let h2 = g.h() * g.h();
    let values = (0..g.cell_count())
        .map(|k| {
            let mut acc = 0.0;
            for axis in 0..g.dim() {
                acc += (phi[g.neighbor(k, axis, 1)] - 2.0 * phi[k] + phi[g.neighbor(k, axis, -1)]) / h2;
            }
            acc
        })
        .collect();
    ScalarField::from_values(&g, values).expect("same grid")
}

/// Wide (five-point per axis) Laplacian, defined as `div_h(grad_h φ)`.
pub fn lap_wide(phi: &ScalarField) -> ScalarField {
    div_h(&grad_h(phi))
}

/// Componentwise compact Laplacian of a vector field.
pub fn lap_compact_vec(v: &VectorField) -> VectorField {
    v.map_components(lap_compact)
}

/// `div_h` of the tensor `ρ u ⊗ u`, one row per momentum component.
///
/// Row `i` is `div_h(ρ u_i u)`, i.e. the central flux average of the
/// explicit momentum convection.
pub fn div_convective_flux(rho: &ScalarField, u: &VectorField) -> VectorField {
    let g = *rho.grid();
    let comps = (0..g.dim())
        .map(|i| {
            let row: Vec<ScalarField> = (0..g.dim())
                .map(|j| {
                    let vals = (0..g.cell_count()).map(|k| rho[k] * u.comp(i)[k] * u.comp(j)[k]).collect();
                    ScalarField::from_values(&g, vals).expect("same grid")
                })
                .collect();
            div_h(&VectorField::from_components(&g, row).expect("same grid"))
        })
        .collect();
    VectorField::from_components(&g, comps).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line4() -> Grid {
        Grid::line(4, 0.0, 1.0).unwrap()
    }

    fn random_field(g: &Grid, rng: &mut ChaCha8Rng) -> ScalarField {
        let vals = (0..g.cell_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        ScalarField::from_values(g, vals).unwrap()
    }

    fn random_vector(g: &Grid, rng: &mut ChaCha8Rng) -> VectorField {
        let comps = (0..g.dim()).map(|_| random_field(g, rng)).collect();
        VectorField::from_components(g, comps).unwrap()
    }

    #[test]
    fn jump_and_average() {
        let g = line4();
        let c = ScalarField::constant(&g, 2.5);
        for f in g.faces() {
            assert_eq!(face_jump(&c, f), 0.0);
            assert_eq!(face_avg(&c, f), 2.5);
        }
        let f = ScalarField::from_values(&g, vec![1.0, 3.0, 0.0, 0.0]).unwrap();
        let face = g.faces().next().unwrap();
        assert_eq!(face_jump(&f, face), 2.0);
        assert_eq!(face_avg(&f, face), 2.0);
        // Seen from the other side the jump flips, the average does not.
        assert_eq!(face_jump(&f, g.opposite(face)), -2.0);
        assert_eq!(face_avg(&f, g.opposite(face)), 2.0);
    }

    #[test]
    fn product_rule_spot_value() {
        let g = line4();
        let f = ScalarField::from_values(&g, vec![1.0, 3.0, 0.0, 0.0]).unwrap();
        let gg = ScalarField::from_values(&g, vec![2.0, 4.0, 0.0, 0.0]).unwrap();
        let fg = f.zip_map(&gg, |a, b| a * b);
        let face = g.faces().next().unwrap();
        assert_eq!(face_jump(&fg, face), 10.0);
        assert_eq!(face_avg(&f, face) * face_jump(&gg, face) + face_jump(&f, face) * face_avg(&gg, face), 10.0);
    }

    #[test]
    fn divergence_and_gradient_on_four_cells() {
        let g = line4();
        let phi = ScalarField::from_values(&g, vec![0.0, 1.0, 0.0, -1.0]).unwrap();
        let v = VectorField::from_components(&g, vec![phi.clone()]).unwrap();
        assert_eq!(div_h(&v).values(), &[4.0, 0.0, -4.0, 0.0]);
        assert_eq!(grad_h(&phi).comp(0).values(), &[4.0, 0.0, -4.0, 0.0]);
    }

    #[test]
    fn compact_laplacian_of_indicator() {
        let g = line4();
        let e0 = ScalarField::from_values(&g, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(lap_compact(&e0).values(), &[-32.0, 16.0, 0.0, 16.0]);
    }

    #[test]
    fn constants_are_annihilated() {
        for g in [line4(), Grid::unit_square(6).unwrap()] {
            let c = ScalarField::constant(&g, 3.0);
            let cv = VectorField::from_fn(&g, |_| [1.5, -2.0]);
            assert_eq!(div_h(&cv).max_abs(), 0.0);
            assert_eq!(grad_h(&c).max_abs(), 0.0);
            assert_eq!(lap_compact(&c).max_abs(), 0.0);
            assert_eq!(lap_wide(&c).max_abs(), 0.0);
        }
    }

    #[test]
    fn divergence_ignores_transverse_variation() {
        let g = Grid::unit_square(8).unwrap();
        let v = VectorField::from_fn(&g, |x| [(2.0 * std::f64::consts::PI * x[1]).sin(), 0.0]);
        assert_eq!(div_h(&v).max_abs(), 0.0);
    }

    #[test]
    fn wide_laplacian_matches_five_point_stencil_in_1d() {
        let g = Grid::line(9, 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phi = random_field(&g, &mut rng);
        let w = lap_wide(&phi);
        let h = g.h();
        for k in 0..g.cell_count() {
            let s = (phi[g.neighbor(k, 0, 2)] - 2.0 * phi[k] + phi[g.neighbor(k, 0, -2)]) / (4.0 * h * h);
            assert!((w[k] - s).abs() <= 1e-12 * s.abs().max(1.0));
        }
    }

    #[test]
    fn grad_div_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let g = if trial % 2 == 0 {
                Grid::line(rng.random_range(4..=32), -1.0, 1.0).unwrap()
            } else {
                let n = rng.random_range(4..=32);
                Grid::unit_square(n).unwrap()
            };
            let phi = random_field(&g, &mut rng);
            let psi = random_vector(&g, &mut rng);
            let a = phi.inner(&div_h(&psi));
            let b = grad_h(&phi).inner(&psi);
            let scale = a.abs().max(b.abs()).max(g.cell_volume() * g.cell_count() as f64 / g.h());
            assert!((a + b).abs() <= 1e-12 * scale, "trial {trial}: {a} vs {b}");
        }
    }

    #[test]
    fn divergence_integrates_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [5, 16, 31] {
            let g = Grid::unit_square(n).unwrap();
            let v = random_vector(&g, &mut rng);
            let d = div_h(&v);
            assert!(d.integral().abs() <= 1e-12 * d.l1_norm().max(1.0));
        }
    }

    #[test]
    fn product_rule_and_average_identity_per_face() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Grid::new(2, &[6, 5], &[0.0, 0.0], &[1.2, 1.0]).unwrap();
        let f = random_field(&g, &mut rng);
        let q = random_field(&g, &mut rng);
        let fq = f.zip_map(&q, |a, b| a * b);
        for face in g.faces().chain(g.faces().map(|fc| g.opposite(fc))) {
            let jump = face_avg(&f, face) * face_jump(&q, face) + face_jump(&f, face) * face_avg(&q, face);
            assert!((face_jump(&fq, face) - jump).abs() <= 1e-15);
            let avg = face_avg(&f, face) * face_avg(&q, face) + 0.25 * face_jump(&f, face) * face_jump(&q, face);
            assert!((face_avg(&fq, face) - avg).abs() <= 1e-15);
        }
    }
}
