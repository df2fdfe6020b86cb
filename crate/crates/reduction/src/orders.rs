//! Feature-removal orders. The identity measurement (index 0) carries no
//! information and is always removed first.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use attribution::ImportanceRanking;

use crate::ReductionError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderProvenance {
    ModelIncreasing,
    ModelDecreasing,
    AggregatedIncreasing,
    AggregatedDecreasing,
    Random { seed: u64 },
    TheoryInformed { name: String },
}

impl OrderProvenance {
    pub fn label(&self) -> String {
        match self {
            OrderProvenance::ModelIncreasing => "model_increasing".into(),
            OrderProvenance::ModelDecreasing => "model_decreasing".into(),
            OrderProvenance::AggregatedIncreasing => "aggregated_increasing".into(),
            OrderProvenance::AggregatedDecreasing => "aggregated_decreasing".into(),
            OrderProvenance::Random { seed } => format!("random_{seed}"),
            OrderProvenance::TheoryInformed { name } => format!("theory_{name}"),
        }
    }
}

/// Theory-informed measurement sets kept until the very end of the removal
/// sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoryOrder {
    /// Two-qubit Schmidt set measured on the second qubit:
    /// {IX, IY, IZ} (lexicographic indices 4, 8, 12).
    TwoQubitSchmidtSecond,
    /// The mirrored set on the first qubit: {XI, YI, ZI} = {1, 2, 3}.
    TwoQubitSchmidtFirst,
    /// Union of the GHZ and W witness supports for three qubits.
    ThreeQubitWitnessSupport,
}

impl TheoryOrder {
    pub fn name(self) -> &'static str {
        match self {
            TheoryOrder::TwoQubitSchmidtSecond => "2q_schmidt_q2",
            TheoryOrder::TwoQubitSchmidtFirst => "2q_schmidt_q1",
            TheoryOrder::ThreeQubitWitnessSupport => "3q_witness_support",
        }
    }

    /// The protected feature set, by lexicographic index.
    pub fn protected_set(self) -> Vec<usize> {
        match self {
            TheoryOrder::TwoQubitSchmidtSecond => vec![4, 8, 12],
            TheoryOrder::TwoQubitSchmidtFirst => vec![1, 2, 3],
            TheoryOrder::ThreeQubitWitnessSupport => {
                let mut set: Vec<usize> =
                    witness::witness_support(&witness::WitnessSpec::ghz_half());
                for j in witness::witness_support(&witness::WitnessSpec::w_two_thirds()) {
                    if !set.contains(&j) {
                        set.push(j);
                    }
                }
                set.sort_unstable();
                set
            }
        }
    }

    pub fn feature_count(self) -> usize {
        match self {
            TheoryOrder::TwoQubitSchmidtSecond | TheoryOrder::TwoQubitSchmidtFirst => 16,
            TheoryOrder::ThreeQubitWitnessSupport => 64,
        }
    }
}

/// A full removal sequence: a permutation of the feature indices, identity
/// first.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalOrder {
    removal: Vec<usize>,
    pub provenance: OrderProvenance,
}

impl RemovalOrder {
    pub fn new(removal: Vec<usize>, provenance: OrderProvenance) -> Result<Self, ReductionError> {
        let n = removal.len();
        let mut seen = vec![false; n];
        for &j in &removal {
            if j >= n || seen[j] {
                return Err(ReductionError::BadOrder(format!(
                    "not a permutation of 0..{n}"
                )));
            }
            seen[j] = true;
        }
        if removal.first() != Some(&0) {
            return Err(ReductionError::BadOrder(
                "identity feature must be removed first".into(),
            ));
        }
        Ok(Self {
            removal,
            provenance,
        })
    }

    pub fn removal_sequence(&self) -> &[usize] {
        &self.removal
    }

    pub fn num_features(&self) -> usize {
        self.removal.len()
    }

    /// Least-important-first removal (identity forced to the front).
    pub fn increasing(ranking: &ImportanceRanking, provenance: OrderProvenance) -> Self {
        let mut removal: Vec<usize> = ranking.order.iter().rev().cloned().collect();
        force_identity_first(&mut removal);
        Self {
            removal,
            provenance,
        }
    }

    /// Most-important-first removal, identity still leading.
    pub fn decreasing(ranking: &ImportanceRanking, provenance: OrderProvenance) -> Self {
        let mut removal: Vec<usize> = ranking.order.clone();
        force_identity_first(&mut removal);
        Self {
            removal,
            provenance,
        }
    }

    /// Uniformly random removal order over the non-identity features.
    pub fn random(num_features: usize, seed: u64) -> Self {
        let mut rest: Vec<usize> = (1..num_features).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rest.shuffle(&mut rng);
        let mut removal = vec![0];
        removal.extend(rest);
        Self {
            removal,
            provenance: OrderProvenance::Random { seed },
        }
    }

    /// Removes everything else (in lexicographic order) before touching the
    /// protected theory set.
    pub fn theory_informed(order: TheoryOrder) -> Self {
        let n = order.feature_count();
        let protected = order.protected_set();
        let mut removal = vec![0usize];
        removal.extend((1..n).filter(|j| !protected.contains(j)));
        removal.extend(protected.iter().cloned());
        Self {
            removal,
            provenance: OrderProvenance::TheoryInformed {
                name: order.name().into(),
            },
        }
    }

    /// Features still present after `removed` removals.
    pub fn surviving(&self, removed: usize) -> Vec<usize> {
        let gone = &self.removal[..removed.min(self.removal.len())];
        (0..self.removal.len())
            .filter(|j| !gone.contains(j))
            .collect()
    }
}

fn force_identity_first(removal: &mut Vec<usize>) {
    if let Some(pos) = removal.iter().position(|&j| j == 0) {
        removal.remove(pos);
    }
    removal.insert(0, 0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use tomography::lex_index;

    #[test]
    fn schmidt_indices_are_the_second_qubit_singles() {
        use qcore::PauliString;
        assert_eq!(lex_index(&PauliString::new(&[0, 1]).unwrap()), 4);
        assert_eq!(lex_index(&PauliString::new(&[0, 2]).unwrap()), 8);
        assert_eq!(lex_index(&PauliString::new(&[0, 3]).unwrap()), 12);
    }

    #[test]
    fn identity_always_first() {
        let ranking = ImportanceRanking::from_scores(vec![0.0, 0.3, 0.9, 0.1]);
        let inc = RemovalOrder::increasing(&ranking, OrderProvenance::ModelIncreasing);
        assert_eq!(inc.removal_sequence()[0], 0);
        let dec = RemovalOrder::decreasing(&ranking, OrderProvenance::ModelDecreasing);
        assert_eq!(dec.removal_sequence()[0], 0);
        // most important (2) goes right after the identity
        assert_eq!(dec.removal_sequence()[1], 2);
        let rand = RemovalOrder::random(16, 5);
        assert_eq!(rand.removal_sequence()[0], 0);
    }

    #[test]
    fn orders_are_permutations() {
        for order in [
            RemovalOrder::random(16, 1),
            RemovalOrder::theory_informed(TheoryOrder::TwoQubitSchmidtSecond),
            RemovalOrder::theory_informed(TheoryOrder::ThreeQubitWitnessSupport),
        ] {
            let mut sorted = order.removal_sequence().to_vec();
            sorted.sort_unstable();
            let expect: Vec<usize> = (0..order.num_features()).collect();
            assert_eq!(sorted, expect);
        }
    }

    #[test]
    fn schmidt_set_survives_longest() {
        let order = RemovalOrder::theory_informed(TheoryOrder::TwoQubitSchmidtSecond);
        let tail = &order.removal_sequence()[13..];
        assert_eq!(tail, &[4, 8, 12]);
        assert_eq!(order.surviving(13), vec![4, 8, 12]);
    }

    #[test]
    fn witness_support_size() {
        let order = RemovalOrder::theory_informed(TheoryOrder::ThreeQubitWitnessSupport);
        // GHZ support (7) and W support (19) share the three ZZ-pair strings
        let protected = TheoryOrder::ThreeQubitWitnessSupport.protected_set();
        assert_eq!(protected.len(), 23);
        assert_eq!(order.num_features(), 64);
    }

    #[test]
    fn bad_orders_rejected() {
        assert!(RemovalOrder::new(vec![1, 0, 2], OrderProvenance::ModelIncreasing).is_err());
        assert!(RemovalOrder::new(vec![0, 1, 1], OrderProvenance::ModelIncreasing).is_err());
    }
}
