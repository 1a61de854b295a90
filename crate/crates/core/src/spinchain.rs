//! Physical model of the three-spin transistor chain.
//!
//! Basis convention, pinned by tests: basis index bit 1 means spin up, and
//! site 0 (the source) is the most significant bit. For three sites the
//! state with the source up and gate/drain down sits at index 4, and the
//! state with only the drain up at index 1. Single-site operators act in
//! the (down, up) index ordering, so `sigma_z` carries eigenvalue +1 on up
//! and -1 on down.

use num_complex::Complex64;

use crate::error::Error;
use crate::qmatrix::{kron, vdot, vec_norm, ComplexMatrix};
use crate::Result;

const NORM_TOL: f64 = 1e-10;

/// Spin orientation of one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Pauli axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Physical parameters of the chain: uniform nearest-neighbor coupling `J`
/// and per-site Z fields `omega_i`, with the gate site detuned by `delta`.
/// All frequencies angular (rad/s), `hbar = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    n_sites: usize,
    omega0: f64,
    delta: f64,
    coupling_j: f64,
    gate_site: usize,
}

impl ChainParams {
    /// Chain with the gate at the middle site (`n_sites / 2`).
    pub fn new(n_sites: usize, omega0: f64, delta: f64, coupling_j: f64) -> Result<Self> {
        Self::with_gate_site(n_sites, omega0, delta, coupling_j, n_sites / 2)
    }

    pub fn with_gate_site(
        n_sites: usize,
        omega0: f64,
        delta: f64,
        coupling_j: f64,
        gate_site: usize,
    ) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_sites must be at least 2, got {n_sites}"
            )));
        }
        if !(coupling_j >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling_j must be non-negative, got {coupling_j}"
            )));
        }
        if gate_site >= n_sites {
            return Err(Error::InvalidParameter(format!(
                "gate_site {gate_site} out of range for {n_sites} sites"
            )));
        }
        if !omega0.is_finite() || !delta.is_finite() || !coupling_j.is_finite() {
            return Err(Error::InvalidParameter("non-finite chain parameter".into()));
        }
        Ok(Self {
            n_sites,
            omega0,
            delta,
            coupling_j,
            gate_site,
        })
    }

    /// Standard three-site chain (source, gate, drain).
    pub fn three_site(omega0: f64, delta: f64, coupling_j: f64) -> Result<Self> {
        Self::new(3, omega0, delta, coupling_j)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn coupling_j(&self) -> f64 {
        self.coupling_j
    }

    pub fn gate_site(&self) -> usize {
        self.gate_site
    }

    /// Z-field frequency of a site: `omega0 + delta` on the gate, `omega0`
    /// elsewhere.
    pub fn omega_at(&self, site: usize) -> f64 {
        if site == self.gate_site {
            self.omega0 + self.delta
        } else {
            self.omega0
        }
    }

    /// Hilbert-space dimension `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }
}

/// A computational-basis state as both a spin pattern and its index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisLabel {
    spins: Vec<Spin>,
    index: usize,
}

impl BasisLabel {
    pub fn from_spins(spins: &[Spin]) -> Self {
        let n = spins.len();
        let mut index = 0usize;
        for (site, s) in spins.iter().enumerate() {
            if *s == Spin::Up {
                index |= 1 << (n - 1 - site);
            }
        }
        Self {
            spins: spins.to_vec(),
            index,
        }
    }

    pub fn from_index(index: usize, n_sites: usize) -> Self {
        assert!(index < (1 << n_sites), "basis index out of range");
        let spins = (0..n_sites)
            .map(|site| {
                if index >> (n_sites - 1 - site) & 1 == 1 {
                    Spin::Up
                } else {
                    Spin::Down
                }
            })
            .collect();
        Self { spins, index }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    /// Number of up spins minus number of down spins.
    pub fn magnetization(&self) -> i64 {
        let ups = self.spins.iter().filter(|s| **s == Spin::Up).count() as i64;
        ups - (self.spins.len() as i64 - ups)
    }
}

/// Normalized state vector over the `2^n` spin basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wrap an amplitude vector, checking normalization to 1e-10.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        assert!(
            amplitudes.len().is_power_of_two(),
            "amplitude count must be a power of two"
        );
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let err = (norm_sq - 1.0).abs();
        if err > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq_error: err });
        }
        Ok(Self { amplitudes })
    }

    /// Basis state `|index>` of an `n_sites` chain.
    pub fn basis(n_sites: usize, index: usize) -> Self {
        let dim = 1 << n_sites;
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn n_sites(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        vdot(&self.amplitudes, &other.amplitudes)
    }

    /// Probability of finding the system in basis state `index`.
    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }
}

/// Product state from an explicit spin pattern.
pub fn product_state(spins: &[Spin]) -> PureState {
    let label = BasisLabel::from_spins(spins);
    PureState::basis(spins.len(), label.index())
}

fn check_pair_normalized(alpha: Complex64, beta: Complex64) -> Result<()> {
    let err = (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs();
    if err > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq_error: err });
    }
    Ok(())
}

/// Input state of the transistor: `(alpha |up> + beta |down>)` on the source
/// and all other sites down. For three sites this places `alpha` on basis
/// index 4 and `beta` on index 0.
pub fn encoded_input_state(alpha: Complex64, beta: Complex64, n_sites: usize) -> Result<PureState> {
    check_pair_normalized(alpha, beta)?;
    let dim = 1usize << n_sites;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[dim >> 1] = alpha; // source up, others down: MSB set
    amplitudes[0] = beta;
    Ok(PureState { amplitudes })
}

/// Transfer target: `(alpha |up> + beta |down>)` on the drain and all other
/// sites down. For three sites this places `alpha` on basis index 1.
pub fn drain_target_state(alpha: Complex64, beta: Complex64, n_sites: usize) -> Result<PureState> {
    check_pair_normalized(alpha, beta)?;
    let dim = 1usize << n_sites;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[1] = alpha;
    amplitudes[0] = beta;
    Ok(PureState { amplitudes })
}

fn single_site(which: Pauli) -> ComplexMatrix {
    let z = |re: f64, im: f64| Complex64::new(re, im);
    // Index ordering (down, up); sigma_z is +1 on up.
    match which {
        Pauli::X => ComplexMatrix::new(2, 2, vec![z(0., 0.), z(1., 0.), z(1., 0.), z(0., 0.)]),
        Pauli::Y => ComplexMatrix::new(2, 2, vec![z(0., 0.), z(0., 1.), z(0., -1.), z(0., 0.)]),
        Pauli::Z => ComplexMatrix::new(2, 2, vec![z(-1., 0.), z(0., 0.), z(0., 0.), z(1., 0.)]),
    }
}

/// Pauli operator embedded at one site of an `n_sites` chain:
/// `I (x) ... (x) sigma (x) ... (x) I`.
pub fn pauli_at(which: Pauli, site: usize, n_sites: usize) -> Result<ComplexMatrix> {
    if site >= n_sites {
        return Err(Error::InvalidParameter(format!(
            "site {site} out of range for {n_sites} sites"
        )));
    }
    let mut m = ComplexMatrix::identity(1);
    for k in 0..n_sites {
        let factor = if k == site {
            single_site(which)
        } else {
            ComplexMatrix::identity(2)
        };
        m = kron(&m, &factor)?;
    }
    Ok(m)
}

/// XY-chain Hamiltonian with per-site Z fields (`hbar = 1`):
/// `H = sum_i omega_i sigma_z^(i)
///    + (J/2) sum_i [sigma_x^(i) sigma_x^(i+1) + sigma_y^(i) sigma_y^(i+1)]`.
///
/// The Z term carries no 1/2 factor. Fields specified in the halved
/// convention `(omega_i/2) sigma_z` map onto this one with `omega` and
/// `delta` divided by two.
pub fn hamiltonian(p: &ChainParams) -> ComplexMatrix {
    let n = p.n_sites();
    let dim = p.dim();
    let mut h = ComplexMatrix::zeros(dim, dim);

    for site in 0..n {
        let z = pauli_at(Pauli::Z, site, n).expect("site in range");
        h = &h + &z.scale_re(p.omega_at(site));
    }

    let half_j = 0.5 * p.coupling_j();
    for site in 0..n - 1 {
        let xx = pauli_at(Pauli::X, site, n)
            .expect("site in range")
            .matmul(&pauli_at(Pauli::X, site + 1, n).expect("site in range"));
        let yy = pauli_at(Pauli::Y, site, n)
            .expect("site in range")
            .matmul(&pauli_at(Pauli::Y, site + 1, n).expect("site in range"));
        h = &h + &(&xx + &yy).scale_re(half_j);
    }
    h
}

/// Total magnetization operator `sum_i sigma_z^(i)`; diagonal with integer
/// spectrum `{-n, -n+2, ..., n}`.
pub fn magnetization_operator(n_sites: usize) -> ComplexMatrix {
    let dim = 1usize << n_sites;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for index in 0..dim {
        let mag = BasisLabel::from_index(index, n_sites).magnetization();
        m.set(index, index, Complex64::new(mag as f64, 0.0));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent 8x8 oracle: Hamiltonian entries straight from bit
    /// arithmetic, no Kronecker products.
    fn brute_force_hamiltonian(omega0: f64, delta: f64, j: f64) -> ComplexMatrix {
        let n = 3usize;
        let dim = 8usize;
        let mut h = ComplexMatrix::zeros(dim, dim);
        for idx in 0..dim {
            let mut diag = 0.0;
            for site in 0..n {
                let up = idx >> (n - 1 - site) & 1 == 1;
                let w = if site == 1 { omega0 + delta } else { omega0 };
                diag += if up { w } else { -w };
            }
            h.set(idx, idx, c(diag, 0.0));
            // Flip-flop on antialigned neighbors: (J/2)(xx + yy) = J * swap.
            for site in 0..n - 1 {
                let b1 = idx >> (n - 1 - site) & 1;
                let b2 = idx >> (n - 2 - site) & 1;
                if b1 != b2 {
                    let flipped = idx ^ (1 << (n - 1 - site)) ^ (1 << (n - 2 - site));
                    h.set(flipped, idx, h.get(flipped, idx) + c(j, 0.0));
                }
            }
        }
        h
    }

    #[test]
    fn basis_label_round_trips_and_conventions() {
        use Spin::{Down, Up};
        let label = BasisLabel::from_spins(&[Up, Down, Down]);
        assert_eq!(label.index(), 4);
        let label = BasisLabel::from_spins(&[Down, Down, Up]);
        assert_eq!(label.index(), 1);
        for idx in 0..8 {
            let l = BasisLabel::from_index(idx, 3);
            assert_eq!(BasisLabel::from_spins(l.spins()).index(), idx);
        }
        assert_eq!(BasisLabel::from_index(0, 3).magnetization(), -3);
        assert_eq!(BasisLabel::from_index(4, 3).magnetization(), -1);
        assert_eq!(BasisLabel::from_index(7, 3).magnetization(), 3);
    }

    #[test]
    fn sigma_z_has_eigenvalue_plus_one_on_up() {
        let z = pauli_at(Pauli::Z, 0, 1).unwrap();
        let up = PureState::basis(1, 1);
        let down = PureState::basis(1, 0);
        let zu = z.matvec(up.amplitudes());
        let zd = z.matvec(down.amplitudes());
        assert_eq!(zu[1], c(1., 0.));
        assert_eq!(zd[0], c(-1., 0.));
    }

    #[test]
    fn embedded_sigma_z_acts_only_on_its_site() {
        let z0 = pauli_at(Pauli::Z, 0, 2).unwrap();
        // Eigenvalue +1 exactly on the indices with the site-0 bit set.
        for idx in 0..4usize {
            let expected = if idx & 0b10 != 0 { 1.0 } else { -1.0 };
            assert_eq!(z0.get(idx, idx), c(expected, 0.0));
        }
    }

    #[test]
    fn sigma_x_flips_the_addressed_site() {
        let x1 = pauli_at(Pauli::X, 1, 3).unwrap();
        let all_down = product_state(&[Spin::Down, Spin::Down, Spin::Down]);
        let flipped = x1.matvec(all_down.amplitudes());
        // |ddd> (index 0) -> |dud> (index 2)
        for (idx, amp) in flipped.iter().enumerate() {
            let expected = if idx == 2 { 1.0 } else { 0.0 };
            assert_eq!(*amp, c(expected, 0.0));
        }
    }

    #[test]
    fn paulis_are_hermitian_unitary_and_site_commuting() {
        let axes = [Pauli::X, Pauli::Y, Pauli::Z];
        for which in axes {
            let m = pauli_at(which, 1, 3).unwrap();
            assert_eq!(m.hermiticity_error(), 0.0);
            let sq = m.matmul(&m);
            assert_eq!(sq.max_diff(&ComplexMatrix::identity(8)), 0.0);
        }
        // Operators on distinct sites commute for every axis pairing.
        for wa in axes {
            for wb in axes {
                for (sa, sb) in [(0usize, 1usize), (0, 2), (1, 2)] {
                    let a = pauli_at(wa, sa, 3).unwrap();
                    let b = pauli_at(wb, sb, 3).unwrap();
                    assert_eq!(a.matmul(&b).max_diff(&b.matmul(&a)), 0.0);
                }
            }
        }
    }

    #[test]
    fn pauli_site_out_of_range_is_rejected() {
        assert!(matches!(
            pauli_at(Pauli::X, 3, 3),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn pauli_algebra_on_one_site() {
        let x = single_site(Pauli::X);
        let y = single_site(Pauli::Y);
        let z = single_site(Pauli::Z);
        // x y = i z
        let xy = x.matmul(&y);
        assert!(xy.max_diff(&z.scale(c(0., 1.))) < 1e-15);
    }

    #[test]
    fn hamiltonian_vanishes_without_fields_or_coupling() {
        let p = ChainParams::three_site(0.0, 0.0, 0.0).unwrap();
        assert_eq!(hamiltonian(&p).max_norm(), 0.0);
    }

    #[test]
    fn hamiltonian_matches_brute_force_oracle() {
        for (w0, d, j) in [(0.0, 0.0, 1.0), (0.7, 3.0, 2.5), (-1.0, 1e3, 10.0)] {
            let p = ChainParams::three_site(w0, d, j).unwrap();
            let h = hamiltonian(&p);
            let oracle = brute_force_hamiltonian(w0, d, j);
            assert!(
                h.max_diff(&oracle) < 1e-12 * 1f64.max(oracle.max_norm()),
                "params ({w0}, {d}, {j})"
            );
        }
    }

    #[test]
    fn flip_flop_element_equals_coupling() {
        // <dud|H|udd> = J for the source-gate pair.
        let p = ChainParams::three_site(0.0, 0.0, 1.0).unwrap();
        let h = hamiltonian(&p);
        assert!((h.get(2, 4) - c(1., 0.)).norm() < 1e-15);
        assert!((h.get(4, 2) - c(1., 0.)).norm() < 1e-15);
        // No direct source-drain hop.
        assert_eq!(h.get(1, 4).norm(), 0.0);
    }

    #[test]
    fn all_down_diagonal_energy() {
        let (w0, d, j) = (0.3, 7.0, 2.0);
        let p = ChainParams::three_site(w0, d, j).unwrap();
        let h = hamiltonian(&p);
        let expected = -(3.0 * w0 + d);
        assert!((h.get(0, 0) - c(expected, 0.)).norm() < 1e-12);
        // The all-down column is otherwise empty: the state is stationary.
        for i in 1..8 {
            assert_eq!(h.get(i, 0).norm(), 0.0);
        }
    }

    #[test]
    fn one_excitation_sector_spectrum_scales_with_sqrt_two() {
        // Restricting the resonant Hamiltonian to the single-excitation
        // states (source, gate, drain up) gives a tridiagonal block with
        // spectrum {-sqrt(2) J, 0, +sqrt(2) J}.
        let j = 1.0;
        let p = ChainParams::three_site(0.0, 0.0, j).unwrap();
        let h = hamiltonian(&p);
        let sector = [4usize, 2, 1];
        let block = ComplexMatrix::from_fn(3, 3, |a, b| h.get(sector[a], sector[b]));
        let eig = crate::qmatrix::eigh(&block).unwrap();
        let sqrt2 = std::f64::consts::SQRT_2;
        assert!((eig.eigenvalues[0] + sqrt2 * j).abs() < 1e-12);
        assert!(eig.eigenvalues[1].abs() < 1e-12);
        assert!((eig.eigenvalues[2] - sqrt2 * j).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_is_hermitian_for_random_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = ChainParams::three_site(
                rng.gen_range(-1e3..1e3),
                rng.gen_range(-1e6..1e6),
                rng.gen_range(0.0..1e4),
            )
            .unwrap();
            let h = hamiltonian(&p);
            assert!(h.hermiticity_error() <= 1e-12 * 1f64.max(h.max_norm()));
        }
    }

    #[test]
    fn hamiltonian_commutes_with_magnetization() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = magnetization_operator(3);
        for _ in 0..20 {
            let p = ChainParams::three_site(
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-1e3..1e3),
                rng.gen_range(0.0..100.0),
            )
            .unwrap();
            let h = hamiltonian(&p);
            let comm = &h.matmul(&m) - &m.matmul(&h);
            assert!(comm.max_norm() < 1e-10 * 1f64.max(h.max_norm()));
        }
    }

    #[test]
    fn magnetization_operator_examples() {
        let m1 = magnetization_operator(1);
        assert_eq!(m1.get(0, 0), c(-1., 0.));
        assert_eq!(m1.get(1, 1), c(1., 0.));

        let m3 = magnetization_operator(3);
        assert_eq!(m3.get(0, 0), c(-3., 0.)); // all down
        assert_eq!(m3.get(4, 4), c(-1., 0.)); // source up only
        let mut spectrum: Vec<f64> = (0..8).map(|i| m3.get(i, i).re).collect();
        spectrum.sort_by(|a, b| a.partial_cmp(b).unwrap());
        spectrum.dedup();
        assert_eq!(spectrum, vec![-3.0, -1.0, 1.0, 3.0]);
    }

    #[test]
    fn encoded_input_examples() {
        let s = encoded_input_state(c(1., 0.), c(0., 0.), 3).unwrap();
        assert_eq!(s.amplitude(4), c(1., 0.));
        assert_eq!(s.probability(0), 0.0);

        let s = encoded_input_state(c(0., 0.), c(1., 0.), 3).unwrap();
        assert_eq!(s.amplitude(0), c(1., 0.));

        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let s = encoded_input_state(c(inv_sqrt2, 0.), c(inv_sqrt2, 0.), 3).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!((s.probability(4) - 0.5).abs() < 1e-12);
        assert!((s.probability(0) - 0.5).abs() < 1e-12);

        assert!(matches!(
            encoded_input_state(c(1., 0.), c(0.5, 0.), 3),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn drain_target_places_alpha_on_drain_up() {
        let s = drain_target_state(c(1., 0.), c(0., 0.), 3).unwrap();
        assert_eq!(s.amplitude(1), c(1., 0.));
    }

    #[test]
    fn chain_params_validation() {
        assert!(ChainParams::new(1, 0.0, 0.0, 1.0).is_err());
        assert!(ChainParams::new(3, 0.0, 0.0, -1.0).is_err());
        assert!(ChainParams::with_gate_site(3, 0.0, 0.0, 1.0, 3).is_err());
        let p = ChainParams::three_site(1.0, 2.0, 3.0).unwrap();
        assert_eq!(p.gate_site(), 1);
        assert_eq!(p.omega_at(0), 1.0);
        assert_eq!(p.omega_at(1), 3.0);
        assert_eq!(p.omega_at(2), 1.0);
    }

    #[test]
    fn general_chain_lengths_are_supported() {
        let p = ChainParams::new(4, 0.5, 2.0, 1.0).unwrap();
        let h = hamiltonian(&p);
        assert_eq!(h.rows(), 16);
        assert!(h.hermiticity_error() <= 1e-12);
        let m = magnetization_operator(4);
        let comm = &h.matmul(&m) - &m.matmul(&h);
        assert!(comm.max_norm() < 1e-10 * h.max_norm());
    }
}
