use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::arrowhead::{Arrowhead, ArrowheadEigen};
use crate::error::{Error, Result};
use crate::weak::{Operator, Propagator, C64};

/// Reference atom coupled with equal strength to an equispaced bath.
///
/// Basis layout (single-excitation sector, dimension `2N + 2`):
/// slot 0 is the reference atom excited; bath atom `k ∈ [−N, N]` excited
/// sits at slot `k + N + 1`. Energies are `E_ref = 0` and `E_k = kΔE`, so
/// the bath includes one atom resonant with the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    n_half: usize,
    delta_e: f64,
    coupling: f64,
    gamma: f64,
}

impl BathSpec {
    pub fn new(n_half: usize, delta_e: f64, coupling: f64) -> Result<Self> {
        if n_half == 0 {
            return Err(Error::param("n_half", "must be positive"));
        }
        if !(delta_e > 0.0 && delta_e.is_finite()) {
            return Err(Error::param(
                "delta_e",
                format!("must be positive, got {delta_e}"),
            ));
        }
        if !(coupling >= 0.0 && coupling.is_finite()) {
            return Err(Error::param(
                "coupling",
                format!("must be non-negative, got {coupling}"),
            ));
        }
        Ok(Self {
            n_half,
            delta_e,
            coupling,
            gamma: PI * coupling * coupling / delta_e,
        })
    }

    /// Chooses the coupling `H = √(γΔE/π)` for a target decay constant.
    pub fn with_gamma(n_half: usize, gamma: f64, delta_e: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::param(
                "gamma",
                format!("must be non-negative, got {gamma}"),
            ));
        }
        if !(delta_e > 0.0) {
            return Err(Error::param(
                "delta_e",
                format!("must be positive, got {delta_e}"),
            ));
        }
        Self::new(n_half, delta_e, (gamma * delta_e / PI).sqrt())
    }

    pub fn n_half(&self) -> usize {
        self.n_half
    }

    pub fn delta_e(&self) -> f64 {
        self.delta_e
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `πH²/ΔE`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        2 * self.n_half + 2
    }

    /// `2π/ΔE`, after which the discrete bath refocuses on the reference.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.delta_e
    }

    /// Durations must stay strictly below half the recurrence time.
    pub fn recurrence_guard(&self) -> f64 {
        0.5 * self.recurrence_time()
    }

    pub fn check_duration(&self, t: f64) -> Result<()> {
        if !(t < self.recurrence_guard()) {
            return Err(Error::BeyondRecurrence {
                t,
                guard: self.recurrence_guard(),
            });
        }
        Ok(())
    }

    pub fn bath_indices(&self) -> impl Iterator<Item = i64> {
        let n = self.n_half as i64;
        -n..=n
    }

    pub fn slot_of_bath(&self, k: i64) -> Result<usize> {
        let n = self.n_half as i64;
        if k < -n || k > n {
            return Err(Error::param(
                "k",
                format!("bath index {k} outside [-{n}, {n}]"),
            ));
        }
        Ok((k + n + 1) as usize)
    }

    /// `None` for the reference slot.
    pub fn bath_of_slot(&self, slot: usize) -> Option<i64> {
        (slot >= 1 && slot < self.dim()).then(|| slot as i64 - self.n_half as i64 - 1)
    }

    pub fn bath_energy(&self, k: i64) -> f64 {
        k as f64 * self.delta_e
    }

    pub fn slot_energy(&self, slot: usize) -> f64 {
        self.bath_of_slot(slot).map_or(0.0, |k| self.bath_energy(k))
    }

    /// Analytic bound on the weight beyond the truncated bandwidth,
    /// `~2γ/(πNΔE)`.
    pub fn truncation_bound(&self) -> f64 {
        2.0 * self.gamma / (PI * self.n_half as f64 * self.delta_e)
    }
}

/// Dense arrowhead Hamiltonian in the slot layout of [`BathSpec`].
pub fn hamiltonian_matrix(bath: &BathSpec) -> DMatrix<f64> {
    let n = bath.dim();
    let mut h = DMatrix::zeros(n, n);
    for slot in 1..n {
        h[(slot, slot)] = bath.slot_energy(slot);
        h[(0, slot)] = bath.coupling;
        h[(slot, 0)] = bath.coupling;
    }
    h
}

pub fn build_hamiltonian(bath: &BathSpec) -> Operator {
    Operator::from_real(&hamiltonian_matrix(bath)).expect("square by construction")
}

#[derive(Debug, Clone)]
enum Spectrum {
    Decoupled,
    Coupled(ArrowheadEigen),
}

/// Cached eigendecomposition of a bath Hamiltonian; every propagator
/// element for every time is served from it.
#[derive(Debug, Clone)]
pub struct BathEigen {
    spec: BathSpec,
    spectrum: Spectrum,
}

impl BathEigen {
    pub fn new(spec: &BathSpec) -> Result<Self> {
        let spectrum = if spec.coupling == 0.0 {
            Spectrum::Decoupled
        } else {
            let poles: Vec<f64> = spec.bath_indices().map(|k| spec.bath_energy(k)).collect();
            let arrow = Arrowhead {
                tip: 0.0,
                couplings: vec![spec.coupling; poles.len()],
                poles,
            };
            Spectrum::Coupled(arrow.solve()?)
        };
        Ok(Self {
            spec: *spec,
            spectrum,
        })
    }

    pub fn spec(&self) -> &BathSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Eigenvalues in ascending order for the coupled case, slot order when
    /// decoupled.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match &self.spectrum {
            Spectrum::Decoupled => (0..self.dim()).map(|s| self.spec.slot_energy(s)).collect(),
            Spectrum::Coupled(e) => e.eigenvalues(),
        }
    }

    /// `V[slot, j]`; in the decoupled case eigenvector `j` is slot `j`.
    pub fn eigenvector_component(&self, slot: usize, j: usize) -> f64 {
        match &self.spectrum {
            Spectrum::Decoupled => f64::from(u8::from(slot == j)),
            Spectrum::Coupled(e) => e.component(slot, j),
        }
    }

    fn weighted_phases(&self, col: usize, t: f64) -> Vec<C64> {
        (0..self.dim())
            .map(|j| match &self.spectrum {
                Spectrum::Decoupled => C64::from_polar(1.0, -self.spec.slot_energy(j) * t),
                Spectrum::Coupled(e) => C64::from_polar(e.component(col, j), -e.eigenvalue(j) * t),
            })
            .collect()
    }

    /// Schrödinger-picture `U_{row,col}(t) = Σ_j V_{row,j} V_{col,j} e^{−iλ_j t}`.
    pub fn element(&self, row: usize, col: usize, t: f64) -> C64 {
        match &self.spectrum {
            Spectrum::Decoupled => {
                if row == col {
                    C64::from_polar(1.0, -self.spec.slot_energy(row) * t)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            Spectrum::Coupled(e) => (0..self.dim())
                .map(|j| {
                    C64::from_polar(
                        e.component(row, j) * e.component(col, j),
                        -e.eigenvalue(j) * t,
                    )
                })
                .sum(),
        }
    }

    /// Column `col` of `U(t)`.
    pub fn column(&self, col: usize, t: f64) -> DVector<C64> {
        match &self.spectrum {
            Spectrum::Decoupled => {
                let mut v = DVector::zeros(self.dim());
                v[col] = C64::from_polar(1.0, -self.spec.slot_energy(col) * t);
                v
            }
            Spectrum::Coupled(e) => {
                // V_{k+1,j} = head_j z_k / (λ_j − d_k), so every pole row is
                // one Cauchy sum over the roots.
                let headed: Vec<C64> = self
                    .weighted_phases(col, t)
                    .into_iter()
                    .enumerate()
                    .map(|(j, p)| p * e.head(j))
                    .collect();
                let rows: Vec<C64> = (0..self.dim())
                    .into_par_iter()
                    .map(|row| match row {
                        0 => headed.iter().sum(),
                        _ => e.sum_over_roots(row - 1, &headed) * e.coupling(row - 1),
                    })
                    .collect();
                DVector::from_vec(rows)
            }
        }
    }

    /// `U_00(t)`, the reference survival amplitude.
    pub fn survival_amplitude(&self, t: f64) -> C64 {
        self.element(0, 0, t)
    }

    /// `|U_00(t)|²` with the recurrence guard applied.
    pub fn survival_probability(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::param("t", format!("must be non-negative, got {t}")));
        }
        self.spec.check_duration(t)?;
        Ok(self.survival_amplitude(t).norm_sqr())
    }

    /// Interaction-picture `Ũ_{slot,0}(t) = e^{iE_slot t} U_{slot,0}(t)`.
    pub fn interaction_element(&self, slot: usize, t: f64) -> C64 {
        C64::from_polar(1.0, self.spec.slot_energy(slot) * t) * self.element(slot, 0, t)
    }

    /// Interaction-picture column 0, i.e. the amplitudes `a_n(t)` evolved
    /// from the excited reference atom.
    pub fn interaction_column(&self, t: f64) -> DVector<C64> {
        let mut c = self.column(0, t);
        for (slot, z) in c.iter_mut().enumerate() {
            *z *= C64::from_polar(1.0, self.spec.slot_energy(slot) * t);
        }
        c
    }

    /// Dense `U(t) = V e^{−iΛt} Vᵀ`. Cubic in the dimension; meant for
    /// small baths and cross-checks.
    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        let n = self.dim();
        let matrix = match &self.spectrum {
            Spectrum::Decoupled => DMatrix::from_diagonal(&DVector::from_fn(n, |s, _| {
                C64::from_polar(1.0, -self.spec.slot_energy(s) * t)
            })),
            Spectrum::Coupled(e) => {
                let v = DMatrix::from_fn(n, n, |r, j| C64::new(e.component(r, j), 0.0));
                let scaled = DMatrix::from_fn(n, n, |r, j| {
                    v[(r, j)] * C64::from_polar(1.0, -e.eigenvalue(j) * t)
                });
                scaled * v.transpose()
            }
        };
        Propagator::new(matrix, t)
    }
}

/// `exp(−iHt)` for the bath, via a fresh eigendecomposition.
pub fn bath_propagator(bath: &BathSpec, t: f64) -> Result<Propagator> {
    BathEigen::new(bath)?.propagator(t)
}

/// `|U_00(t)|²` from the finite-bath propagator.
pub fn survival_probability(bath: &BathSpec, t: f64) -> Result<f64> {
    BathEigen::new(bath)?.survival_probability(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;

    #[test]
    fn layout_bijection() {
        let b = BathSpec::new(3, 0.5, 0.1).unwrap();
        assert_eq!(b.dim(), 8);
        for k in b.bath_indices() {
            let s = b.slot_of_bath(k).unwrap();
            assert!(s >= 1);
            assert_eq!(b.bath_of_slot(s), Some(k));
            assert_eq!(b.slot_energy(s), k as f64 * 0.5);
        }
        assert_eq!(b.bath_of_slot(0), None);
        assert_eq!(b.bath_of_slot(8), None);
        assert!(b.slot_of_bath(4).is_err());
        assert!(b.slot_of_bath(-4).is_err());
    }

    #[test]
    fn hamiltonian_small_example() {
        let b = BathSpec::new(1, 1.0, 0.1).unwrap();
        let h = hamiltonian_matrix(&b);
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.1, 0.1, 0.1,
            0.1, -1.0, 0.0, 0.0,
            0.1, 0.0, 0.0, 0.0,
            0.1, 0.0, 0.0, 1.0,
        ]);
        assert_eq!(h, expected);
        assert!(build_hamiltonian(&b).is_hermitian(0.0));
    }

    #[test]
    fn gamma_from_coupling() {
        let de = 0.005;
        let h = (de / PI).sqrt();
        let b = BathSpec::new(2000, de, h).unwrap();
        assert_abs_diff_eq!(b.gamma(), 1.0, epsilon = 1e-12);
        let b = BathSpec::with_gamma(2000, 1.0, de).unwrap();
        assert_abs_diff_eq!(b.gamma(), 1.0, epsilon = 1e-12);
        assert_eq!(b.gamma(), PI * b.coupling() * b.coupling() / b.delta_e());
    }

    #[test]
    fn invalid_specs() {
        assert!(BathSpec::new(0, 0.1, 0.1).is_err());
        assert!(BathSpec::new(1, 0.0, 0.1).is_err());
        assert!(BathSpec::new(1, 0.1, -0.1).is_err());
        assert!(BathSpec::with_gamma(1, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn decoupled_bath_never_transfers() {
        let b = BathSpec::new(5, 0.3, 0.0).unwrap();
        let e = BathEigen::new(&b).unwrap();
        for t in [0.0, 0.7, 3.0] {
            assert_abs_diff_eq!(e.survival_probability(t).unwrap(), 1.0, epsilon = 1e-15);
            let u = e.propagator(t).unwrap();
            for s in 0..b.dim() {
                let want = C64::from_polar(1.0, -b.slot_energy(s) * t);
                assert_abs_diff_eq!((u.matrix()[(s, s)] - want).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let b = BathSpec::with_gamma(10, 1.0, 0.1).unwrap();
        let u = bath_propagator(&b, 0.0).unwrap();
        assert!(u.max_diff(&Propagator::identity(b.dim())) <= 1e-12);
    }

    #[test]
    fn propagator_matches_dense_eigh() {
        let b = BathSpec::with_gamma(20, 1.0, 0.1).unwrap();
        let dense = SymmetricEigen::new(hamiltonian_matrix(&b));
        let e = BathEigen::new(&b).unwrap();
        for t in [0.3, 2.0, 7.5] {
            let v = dense.eigenvectors.map(|x| C64::new(x, 0.0));
            let phases =
                DMatrix::from_diagonal(&dense.eigenvalues.map(|l| C64::from_polar(1.0, -l * t)));
            let reference = &v * phases * v.transpose();
            let u = e.propagator(t).unwrap();
            assert!(
                crate::weak::Propagator::new(reference, t)
                    .unwrap()
                    .max_diff(&u)
                    <= 1e-12
            );
            let col = e.column(0, t);
            for s in 0..b.dim() {
                assert_abs_diff_eq!((col[s] - u.matrix()[(s, 0)]).norm(), 0.0, epsilon = 1e-13);
                assert_abs_diff_eq!(
                    (e.element(s, 3, t) - u.matrix()[(s, 3)]).norm(),
                    0.0,
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn unitarity_and_reversal() {
        let b = BathSpec::with_gamma(60, 1.0, 0.1).unwrap();
        let e = BathEigen::new(&b).unwrap();
        for t in [0.5, 4.0, 20.0] {
            let u = e.propagator(t).unwrap();
            assert!(u.unitarity_defect() <= 1e-10);
            assert!(u.adjoint().max_diff(&e.propagator(-t).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn survival_guard() {
        let b = BathSpec::with_gamma(10, 1.0, 0.5).unwrap();
        let e = BathEigen::new(&b).unwrap();
        assert!(e.survival_probability(b.recurrence_guard() - 1e-9).is_ok());
        assert!(matches!(
            e.survival_probability(b.recurrence_guard()),
            Err(Error::BeyondRecurrence { .. })
        ));
        assert_abs_diff_eq!(e.survival_probability(0.0).unwrap(), 1.0, epsilon = 1e-13);
    }
}
