use std::cmp::Ordering;

/// An exponent vector, ordered by graded lexicographic order: total degree
/// first, then the exponent of the earliest variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Monomial {
        let degree = exps.iter().sum();
        Monomial { exps, degree }
    }

    pub fn one(nvars: usize) -> Monomial {
        Monomial { exps: vec![0; nvars], degree: 0 }
    }

    /// The monomial `x_index`.
    pub fn var(nvars: usize, index: usize) -> Monomial {
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Monomial { exps, degree: 1 }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.exps[index]
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
            degree: self.degree + other.degree,
        }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(Monomial { exps, degree: self.degree - other.degree })
    }

    /// Splits the monomial into two factors, the first of degree `first_degree`,
    /// taking exponents greedily from the earliest variable.
    pub fn split_at_degree(&self, first_degree: u32) -> (Monomial, Monomial) {
        let mut left = vec![0; self.exps.len()];
        let mut need = first_degree.min(self.degree);
        for (i, &e) in self.exps.iter().enumerate() {
            let take = e.min(need);
            left[i] = take;
            need -= take;
        }
        let right: Vec<u32> = self.exps.iter().zip(&left).map(|(e, l)| e - l).collect();
        (Monomial::new(left), Monomial::new(right))
    }

    /// Pads with zero exponents up to `nvars` variables.
    pub fn padded(&self, nvars: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps.resize(nvars, 0);
        Monomial { exps, degree: self.degree }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
