//! Finite groups given extensionally as lists of unitaries.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{gates, ComplexMatrix};

const UNITARY_TOL: f64 = 1e-12;
const CLOSURE_TOL: f64 = 1e-10;

/// Unitary representation {U(g)} of a finite group with optional output-side
/// representation {V(g)} and outcome permutations {π_g}.
#[derive(Clone, Debug)]
pub struct GroupRep {
    elements: Vec<ComplexMatrix>,
    out_elements: Option<Vec<ComplexMatrix>>,
    out_perm: Option<Vec<Vec<usize>>>,
}

impl GroupRep {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_outputs(elements, None, None)
    }

    pub fn with_outputs(
        elements: Vec<ComplexMatrix>,
        out_elements: Option<Vec<ComplexMatrix>>,
        out_perm: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        validate_elements("elements", &elements)?;
        if let Some(out) = &out_elements {
            if out.len() != elements.len() {
                return Err(Error::InvalidInput(format!(
                    "{} output elements for a group of order {}",
                    out.len(),
                    elements.len()
                )));
            }
            validate_elements("out_elements", out)?;
        }
        if let Some(perms) = &out_perm {
            validate_perms(perms, elements.len())?;
        }
        Ok(Self {
            elements,
            out_elements,
            out_perm,
        })
    }

    /// The trivial group {I} on dimension d.
    pub fn trivial(d: usize) -> Self {
        Self {
            elements: vec![ComplexMatrix::identity(d)],
            out_elements: None,
            out_perm: None,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, g: usize) -> &ComplexMatrix {
        &self.elements[g]
    }

    /// V(g); falls back to U(g) when no output representation is set.
    pub fn out_element(&self, g: usize) -> &ComplexMatrix {
        match &self.out_elements {
            Some(out) => &out[g],
            None => &self.elements[g],
        }
    }

    pub fn out_dim(&self) -> usize {
        self.out_element(0).rows()
    }

    pub fn has_out_elements(&self) -> bool {
        self.out_elements.is_some()
    }

    pub fn out_perm(&self) -> Option<&[Vec<usize>]> {
        self.out_perm.as_deref()
    }

    /// Replaces the outcome permutations.
    pub fn with_out_perm(mut self, perms: Vec<Vec<usize>>) -> Result<Self> {
        validate_perms(&perms, self.order())?;
        self.out_perm = Some(perms);
        Ok(self)
    }

    /// Sets π_g = id for every g on an alphabet of `outcomes` symbols.
    pub fn with_identity_perm(self, outcomes: usize) -> Result<Self> {
        let id: Vec<usize> = (0..outcomes).collect();
        let n = self.order();
        self.with_out_perm(vec![id; n])
    }

    /// (1/|G|) Σ_g U(g) ρ U(g)†.
    pub fn twirl(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim();
        if rho.rows() != d || rho.cols() != d {
            return Err(Error::dims(
                "twirl",
                format!(
                    "{d}-dimensional rep, {}x{} operator",
                    rho.rows(),
                    rho.cols()
                ),
            ));
        }
        let mut acc = ComplexMatrix::zeros(d, d);
        for u in &self.elements {
            acc = &acc + &rho.conjugate_by(u);
        }
        Ok(acc.scale_real(1.0 / self.order() as f64))
    }

    /// Uniform group index drawn from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.order() == 1 {
            0
        } else {
            rng.random_range(0..self.order())
        }
    }
}

fn validate_elements(what: &str, elements: &[ComplexMatrix]) -> Result<()> {
    let first = elements
        .first()
        .ok_or_else(|| Error::InvalidInput(format!("{what}: group has no elements")))?;
    let d = first.square_dim("group element")?;
    for (g, u) in elements.iter().enumerate() {
        if u.rows() != d || u.cols() != d {
            return Err(Error::dims(
                "GroupRep",
                format!("{what}[{g}] is not {d}x{d}"),
            ));
        }
        if !u.is_unitary(UNITARY_TOL) {
            return Err(Error::InvalidInput(format!("{what}[{g}] is not unitary")));
        }
    }
    if first.max_abs_diff(&ComplexMatrix::identity(d)) > UNITARY_TOL {
        return Err(Error::InvalidInput(format!(
            "{what}[0] must be the identity"
        )));
    }
    for a in elements {
        for b in elements {
            let p = a * b;
            if !elements.iter().any(|c| c.max_abs_diff(&p) <= CLOSURE_TOL) {
                return Err(Error::InvalidInput(format!(
                    "{what} are not closed under products"
                )));
            }
        }
    }
    Ok(())
}

fn validate_perms(perms: &[Vec<usize>], order: usize) -> Result<()> {
    if perms.len() != order {
        return Err(Error::InvalidInput(format!(
            "{} outcome permutations for a group of order {order}",
            perms.len()
        )));
    }
    let n = perms[0].len();
    for (g, p) in perms.iter().enumerate() {
        let mut seen = vec![false; n];
        if p.len() != n {
            return Err(Error::InvalidInput(format!(
                "permutation {g} has the wrong length"
            )));
        }
        for &x in p {
            if x >= n || seen[x] {
                return Err(Error::InvalidInput(format!(
                    "permutation {g} is not a bijection"
                )));
            }
            seen[x] = true;
        }
    }
    if perms[0].iter().enumerate().any(|(i, &x)| i != x) {
        return Err(Error::InvalidInput(
            "permutation 0 must be the identity".into(),
        ));
    }
    Ok(())
}

/// Names accepted by [`builtin_rep`].
pub const BUILTIN_REPS: &[&str] = &["I,X", "I,Z", "I,Z1Z2", "I,X1X2", "I,SWAP"];

/// Built-in ℤ₂ representations. "I,X" and "I,Z" act transversally on
/// `qubits` qubits; the two-qubit names require `qubits == 2`.
pub fn builtin_rep(name: &str, qubits: usize) -> Result<GroupRep> {
    let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let two = |g: ComplexMatrix| -> Result<ComplexMatrix> {
        if qubits != 2 {
            return Err(Error::InvalidInput(format!(
                "representation {compact} acts on 2 qubits, not {qubits}"
            )));
        }
        Ok(g)
    };
    if qubits == 0 {
        return Err(Error::InvalidInput(
            "representation needs at least one qubit".into(),
        ));
    }
    let generator = match compact.as_str() {
        "I,X" => gates::tensor_power(&gates::pauli_x(), qubits),
        "I,Z" => gates::tensor_power(&gates::pauli_z(), qubits),
        "I,Z1Z2" => two(gates::tensor_power(&gates::pauli_z(), 2))?,
        "I,X1X2" => two(gates::tensor_power(&gates::pauli_x(), 2))?,
        "I,SWAP" => two(gates::swap(2))?,
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown representation {name:?} (known: {})",
                BUILTIN_REPS.join(" ")
            )))
        }
    };
    let d = generator.rows();
    GroupRep::new(vec![ComplexMatrix::identity(d), generator])
}

/// Outcome permutation x ↦ x ⊕ 1…1 on n-bit strings.
pub fn bit_flip_perm(n: usize) -> Vec<usize> {
    let mask = (1usize << n) - 1;
    (0..1usize << n).map(|x| x ^ mask).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5])
    }

    #[test]
    fn builtin_elements() {
        let z = builtin_rep("I,Z", 1).unwrap();
        assert_eq!(z.order(), 2);
        assert_eq!(
            *z.element(1),
            ComplexMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)])
        );
        let s = builtin_rep("I,SWAP", 2).unwrap();
        assert_eq!(*s.element(1), gates::swap(2));
        let xx = builtin_rep("I,X1X2", 2).unwrap();
        let x = gates::pauli_x();
        assert_eq!(*xx.element(1), crate::linalg::kron(&x, &x));
        for name in BUILTIN_REPS {
            let r = builtin_rep(name, 2).unwrap();
            let sq = r.element(1) * r.element(1);
            assert!(sq.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
        }
        assert!(builtin_rep("I,Y", 1).is_err());
        assert!(builtin_rep("I,SWAP", 1).is_err());
        assert_eq!(builtin_rep("I,X", 3).unwrap().dim(), 8);
    }

    #[test]
    fn twirl_examples() {
        let z = builtin_rep("I,Z", 1).unwrap();
        let t = z.twirl(&plus()).unwrap();
        let direct = (&plus() + &plus().conjugate_by(&gates::pauli_z())).scale_real(0.5);
        assert!(t.max_abs_diff(&direct) < 1e-15);
        assert!(t.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        let zero = ComplexMatrix::basis_projector(2, 0);
        assert!(z.twirl(&zero).unwrap().max_abs_diff(&zero) < 1e-15);

        let x = builtin_rep("I,X", 1).unwrap();
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(x.twirl(&mixed).unwrap().max_abs_diff(&mixed) < 1e-15);
        assert!(x.twirl(&ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn validation() {
        let x = gates::pauli_x();
        assert!(GroupRep::new(vec![x.clone(), ComplexMatrix::identity(2)]).is_err());
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(GroupRep::new(vec![ComplexMatrix::identity(2), half]).is_err());
        // {I, H, X} is not closed.
        let not_closed = vec![ComplexMatrix::identity(2), gates::hadamard(), x.clone()];
        assert!(GroupRep::new(not_closed).is_err());

        let r = builtin_rep("I,X", 1).unwrap();
        assert!(r
            .clone()
            .with_out_perm(vec![vec![0, 1], vec![0, 0]])
            .is_err());
        assert!(r
            .clone()
            .with_out_perm(vec![vec![1, 0], vec![0, 1]])
            .is_err());
        assert!(r.clone().with_out_perm(vec![vec![0, 1]]).is_err());
        assert!(r.with_out_perm(vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = GroupRep::trivial(2);
        assert!((0..100).all(|_| t.sample(&mut rng) == 0));

        let r = builtin_rep("I,X", 1).unwrap();
        let n = 100_000;
        let ones = (0..n).filter(|_| r.sample(&mut rng) == 1).count();
        assert!((ones as f64 / n as f64 - 0.5).abs() < 0.01);

        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| r.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
    }

    #[test]
    fn bit_flip() {
        assert_eq!(bit_flip_perm(1), vec![1, 0]);
        assert_eq!(bit_flip_perm(2), vec![3, 2, 1, 0]);
    }
}
