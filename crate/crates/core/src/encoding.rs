//! Pauli-string families used to encode classical variables.
//!
//! Every string carries a single non-identity Pauli type. Strings are
//! enumerated deterministically: support sets of the chosen order are walked
//! in lexicographic order of their bit indices (bit `b` is qubit `m - 1 - b`,
//! so qubit 0 is the leftmost letter), and for the full `{X, Y, Z}` family
//! the three types are emitted for each support set before moving on. For
//! `m = 3, k = 2` this yields `IXX, IYY, IZZ, XIX, YIY, ZIZ, XXI, YYI, ZZI`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{param_error, Error, Result};

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    variable_index: usize,
}

impl PauliString {
    /// Builds a string, rejecting mixed Pauli types and the all-identity
    /// string.
    pub fn new(letters: Vec<Pauli>, variable_index: usize) -> Result<Self> {
        let mut kind = None;
        for &p in letters.iter().filter(|&&p| p != Pauli::I) {
            match kind {
                None => kind = Some(p),
                Some(k) if k != p => {
                    return Err(param_error("Pauli string mixes operator types"));
                }
                _ => {}
            }
        }
        if kind.is_none() {
            return Err(param_error("Pauli string has no non-identity letter"));
        }
        Ok(Self {
            letters,
            variable_index,
        })
    }

    /// Places `pauli` on the qubits with the given bit indices.
    fn on_bits(pauli: Pauli, qubits: usize, bits: &[usize], variable_index: usize) -> Self {
        let mut letters = vec![Pauli::I; qubits];
        for &b in bits {
            letters[qubits - 1 - b] = pauli;
        }
        Self {
            letters,
            variable_index,
        }
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn qubits(&self) -> usize {
        self.letters.len()
    }

    /// Number of non-identity letters.
    pub fn order(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// The single non-identity Pauli type the string uses.
    pub fn kind(&self) -> Pauli {
        self.letters
            .iter()
            .copied()
            .find(|&p| p != Pauli::I)
            .unwrap_or(Pauli::I)
    }

    pub fn variable_index(&self) -> usize {
        self.variable_index
    }

    /// Bit mask of qubits flipped by the operator (X or Y letters).
    pub fn flip_mask(&self) -> usize {
        self.mask(|p| matches!(p, Pauli::X | Pauli::Y))
    }

    /// Bit mask of qubits that pick up a sign on `|1⟩` (Y or Z letters).
    pub fn phase_mask(&self) -> usize {
        self.mask(|p| matches!(p, Pauli::Y | Pauli::Z))
    }

    pub fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&p| p == Pauli::Y).count()
    }

    fn mask(&self, pick: impl Fn(Pauli) -> bool) -> usize {
        let m = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| pick(p))
            .fold(0, |acc, (q, _)| acc | 1 << (m - 1 - q))
    }

    /// Two Pauli strings commute iff they anticommute on an even number of
    /// qubits.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| param_error(format!("invalid Pauli letter {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters, 0)
    }
}

/// Which strings an encoding may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case")
)]
pub enum EncodingFamily {
    /// X-, Y- and Z-type strings of a fixed order.
    FullXyzFixedK { k: usize },
    /// One Pauli type, fixed order.
    SinglePauliFixedK { pauli: Pauli, k: usize },
    /// One Pauli type, every order in `k_min..=k_max` (orders above the
    /// register size contribute nothing).
    SinglePauliMixedK {
        pauli: Pauli,
        k_min: usize,
        k_max: usize,
    },
}

impl EncodingFamily {
    fn paulis(&self) -> &'static [Pauli] {
        const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
        match self {
            EncodingFamily::FullXyzFixedK { .. } => &XYZ,
            EncodingFamily::SinglePauliFixedK { pauli, .. }
            | EncodingFamily::SinglePauliMixedK { pauli, .. } => match pauli {
                Pauli::X => &XYZ[0..1],
                Pauli::Y => &XYZ[1..2],
                _ => &XYZ[2..3],
            },
        }
    }

    fn validate(&self, qubits: usize) -> Result<()> {
        if qubits == 0 {
            return Err(param_error("register needs at least one qubit"));
        }
        match *self {
            EncodingFamily::FullXyzFixedK { k } | EncodingFamily::SinglePauliFixedK { k, .. } => {
                if k == 0 || k > qubits {
                    return Err(param_error(format!("order k = {k} outside [1, {qubits}]")));
                }
            }
            EncodingFamily::SinglePauliMixedK { k_min, k_max, .. } => {
                if k_min == 0 || k_min > k_max || k_min > qubits {
                    return Err(param_error(format!(
                        "order range [{k_min}, {k_max}] invalid for {qubits} qubits"
                    )));
                }
            }
        }
        if let EncodingFamily::SinglePauliFixedK {
            pauli: Pauli::I, ..
        }
        | EncodingFamily::SinglePauliMixedK {
            pauli: Pauli::I, ..
        } = self
        {
            return Err(param_error("identity is not an encoding Pauli"));
        }
        Ok(())
    }

    fn orders(&self, qubits: usize) -> core::ops::RangeInclusive<usize> {
        match *self {
            EncodingFamily::FullXyzFixedK { k } | EncodingFamily::SinglePauliFixedK { k, .. } => {
                k..=k
            }
            EncodingFamily::SinglePauliMixedK { k_min, k_max, .. } => k_min..=k_max.min(qubits),
        }
    }

    /// Lowest register size the family is defined on.
    fn min_qubits(&self) -> usize {
        match *self {
            EncodingFamily::FullXyzFixedK { k } | EncodingFamily::SinglePauliFixedK { k, .. } => {
                k.max(1)
            }
            EncodingFamily::SinglePauliMixedK { k_min, .. } => k_min.max(1),
        }
    }

    /// Number of distinct strings the family provides on `qubits` qubits.
    pub fn capacity(&self, qubits: usize) -> Result<usize> {
        self.validate(qubits)?;
        let per_type: usize = self.orders(qubits).map(|k| binomial(qubits, k)).sum();
        Ok(per_type * self.paulis().len())
    }

    /// Smallest register holding `n_vars` variables.
    pub fn minimal_qubits(&self, n_vars: usize) -> Result<usize> {
        if n_vars == 0 {
            return Err(param_error("need at least one variable"));
        }
        let mut m = self.min_qubits();
        loop {
            if self.capacity(m)? >= n_vars {
                return Ok(m);
            }
            m += 1;
        }
    }

    /// Short human-readable tag, e.g. `xyz-k2` or `z-k1..4`.
    pub fn label(&self) -> String {
        match *self {
            EncodingFamily::FullXyzFixedK { k } => format!("xyz-k{k}"),
            EncodingFamily::SinglePauliFixedK { pauli, k } => {
                format!("{}-k{k}", pauli.as_char().to_ascii_lowercase())
            }
            EncodingFamily::SinglePauliMixedK {
                pauli,
                k_min,
                k_max,
            } => {
                format!("{}-k{k_min}..{k_max}", pauli.as_char().to_ascii_lowercase())
            }
        }
    }
}

/// An encoding family instantiated on a register for a number of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EncodingSpec {
    pub family: EncodingFamily,
    pub qubits: usize,
    pub n_vars: usize,
    /// Shuffles which variable receives which string.
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub permutation_seed: Option<u64>,
}

impl EncodingSpec {
    pub fn new(family: EncodingFamily, qubits: usize, n_vars: usize) -> Result<Self> {
        let spec = Self {
            family,
            qubits,
            n_vars,
            permutation_seed: None,
        };
        spec.check_capacity()?;
        Ok(spec)
    }

    /// Full `{X, Y, Z}` encoding on the smallest register, with order 2 up
    /// to 25 variables, 3 below 150 and 4 from 150 on.
    pub fn default_for(n_vars: usize) -> Result<Self> {
        let k = match n_vars {
            0..=25 => 2,
            26..=149 => 3,
            _ => 4,
        };
        let family = EncodingFamily::FullXyzFixedK { k };
        Self::new(family, family.minimal_qubits(n_vars)?, n_vars)
    }

    pub fn capacity(&self) -> Result<usize> {
        self.family.capacity(self.qubits)
    }

    fn check_capacity(&self) -> Result<()> {
        let capacity = self.capacity()?;
        if capacity < self.n_vars {
            return Err(Error::Capacity {
                required: self.n_vars,
                capacity,
            });
        }
        Ok(())
    }

    /// The strings assigned to variables `0..n_vars`, in variable order.
    pub fn enumerate_strings(&self) -> Result<Vec<PauliString>> {
        self.check_capacity()?;
        let m = self.qubits;
        let mut out = Vec::with_capacity(self.n_vars);
        'outer: for k in self.family.orders(m) {
            let mut bits: Vec<usize> = (0..k).collect();
            loop {
                for &p in self.family.paulis() {
                    if out.len() == self.n_vars {
                        break 'outer;
                    }
                    out.push(PauliString::on_bits(p, m, &bits, out.len()));
                }
                if !next_combination(&mut bits, m) {
                    break;
                }
            }
        }
        if let Some(seed) = self.permutation_seed {
            out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            for (i, s) in out.iter_mut().enumerate() {
                s.variable_index = i;
            }
        }
        Ok(out)
    }
}

/// Advances `bits` to the next `k`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(bits: &mut [usize], n: usize) -> bool {
    let k = bits.len();
    let Some(i) = (0..k).rev().find(|&i| bits[i] < n - k + i) else {
        return false;
    };
    bits[i] += 1;
    for j in (i + 1)..k {
        bits[j] = bits[j - 1] + 1;
    }
    true
}

/// `n choose k`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Splits strings into groups that can share one measurement setting: one
/// group per Pauli type, ordered X, Y, Z, empty groups omitted.
pub fn commuting_groups(strings: &[PauliString]) -> Vec<Vec<&PauliString>> {
    [Pauli::X, Pauli::Y, Pauli::Z]
        .into_iter()
        .map(|p| strings.iter().filter(|s| s.kind() == p).collect::<Vec<_>>())
        .filter(|g| !g.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn names(strings: &[PauliString]) -> Vec<String> {
        strings.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn full_xyz_three_qubits() {
        let spec = EncodingSpec::new(EncodingFamily::FullXyzFixedK { k: 2 }, 3, 9).unwrap();
        let s = spec.enumerate_strings().unwrap();
        assert_eq!(
            names(&s),
            ["IXX", "IYY", "IZZ", "XIX", "YIY", "ZIZ", "XXI", "YYI", "ZZI"]
        );
        assert!(s
            .iter()
            .enumerate()
            .all(|(i, p)| p.variable_index() == i && p.order() == 2));
    }

    #[test]
    fn single_z_five_qubits() {
        let fam = EncodingFamily::SinglePauliFixedK {
            pauli: Pauli::Z,
            k: 2,
        };
        let s = EncodingSpec::new(fam, 5, 9)
            .unwrap()
            .enumerate_strings()
            .unwrap();
        assert_eq!(
            names(&s),
            ["IIIZZ", "IIZIZ", "IZIIZ", "ZIIIZ", "IIZZI", "IZIZI", "ZIIZI", "IZZII", "ZIZII"]
        );
    }

    #[test]
    fn mixed_k_orders_ascending() {
        let fam = EncodingFamily::SinglePauliMixedK {
            pauli: Pauli::Z,
            k_min: 1,
            k_max: 4,
        };
        assert_eq!(fam.capacity(4).unwrap(), 15);
        let s = EncodingSpec::new(fam, 4, 15)
            .unwrap()
            .enumerate_strings()
            .unwrap();
        let orders: Vec<usize> = s.iter().map(PauliString::order).collect();
        assert_eq!(orders, [1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 4]);
        assert_eq!(s[0].to_string(), "IIIZ");
        assert_eq!(s[14].to_string(), "ZZZZ");
        // Orders beyond the register contribute nothing.
        assert_eq!(fam.capacity(3).unwrap(), 7);
    }

    #[test]
    fn capacities() {
        let single = EncodingFamily::SinglePauliFixedK {
            pauli: Pauli::Z,
            k: 2,
        };
        assert_eq!(single.capacity(4).unwrap(), 6);
        assert_eq!(
            EncodingFamily::FullXyzFixedK { k: 2 }.capacity(3).unwrap(),
            9
        );
        assert!(EncodingFamily::FullXyzFixedK { k: 4 }.capacity(3).is_err());
        assert!(EncodingFamily::FullXyzFixedK { k: 0 }.capacity(3).is_err());
        assert!(EncodingFamily::SinglePauliFixedK {
            pauli: Pauli::I,
            k: 1
        }
        .capacity(3)
        .is_err());
    }

    #[test]
    fn minimal_register_sizes() {
        let xyz2 = EncodingFamily::FullXyzFixedK { k: 2 };
        assert_eq!(xyz2.minimal_qubits(6).unwrap(), 3);
        assert_eq!(xyz2.minimal_qubits(14).unwrap(), 4);
        assert_eq!(xyz2.minimal_qubits(18).unwrap(), 4);
        assert_eq!(xyz2.minimal_qubits(20).unwrap(), 5);
        assert_eq!(xyz2.minimal_qubits(25).unwrap(), 5);
        assert_eq!(
            EncodingFamily::FullXyzFixedK { k: 3 }
                .minimal_qubits(50)
                .unwrap(),
            6
        );
        assert_eq!(
            EncodingFamily::FullXyzFixedK { k: 4 }
                .minimal_qubits(150)
                .unwrap(),
            8
        );
        assert_eq!(
            EncodingFamily::FullXyzFixedK { k: 4 }
                .minimal_qubits(300)
                .unwrap(),
            9
        );
        let z2 = EncodingFamily::SinglePauliFixedK {
            pauli: Pauli::Z,
            k: 2,
        };
        assert_eq!(z2.minimal_qubits(9).unwrap(), 5);
    }

    #[test]
    fn default_encodings_by_size() {
        for (n, m, k) in [
            (6, 3, 2),
            (14, 4, 2),
            (18, 4, 2),
            (20, 5, 2),
            (25, 5, 2),
            (50, 6, 3),
            (150, 8, 4),
            (300, 9, 4),
        ] {
            let spec = EncodingSpec::default_for(n).unwrap();
            assert_eq!(spec.qubits, m, "n = {n}");
            assert_eq!(spec.family, EncodingFamily::FullXyzFixedK { k });
        }
    }

    #[test]
    fn capacity_exceeded() {
        let err = EncodingSpec::new(EncodingFamily::FullXyzFixedK { k: 2 }, 3, 10).unwrap_err();
        assert_eq!(
            err,
            Error::Capacity {
                required: 10,
                capacity: 9
            }
        );
    }

    #[test]
    fn groups() {
        let s = EncodingSpec::new(EncodingFamily::FullXyzFixedK { k: 2 }, 3, 9)
            .unwrap()
            .enumerate_strings()
            .unwrap();
        let g = commuting_groups(&s);
        assert_eq!(g.len(), 3);
        assert!(g.iter().all(|grp| grp.len() == 3));
        assert!(g[0].iter().all(|p| p.kind() == Pauli::X));

        let z = EncodingSpec::new(
            EncodingFamily::SinglePauliFixedK {
                pauli: Pauli::Z,
                k: 3,
            },
            5,
            10,
        )
        .unwrap()
        .enumerate_strings()
        .unwrap();
        assert_eq!(commuting_groups(&z).len(), 1);
        assert!(commuting_groups(&[]).is_empty());
    }

    #[test]
    fn permutation_seed_shuffles_assignment() {
        let mut spec = EncodingSpec::new(EncodingFamily::FullXyzFixedK { k: 2 }, 4, 18).unwrap();
        let plain = spec.enumerate_strings().unwrap();
        spec.permutation_seed = Some(3);
        let shuffled = spec.enumerate_strings().unwrap();
        assert_ne!(names(&plain), names(&shuffled));
        let mut a = names(&plain);
        let mut b = names(&shuffled);
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!(shuffled
            .iter()
            .enumerate()
            .all(|(i, p)| p.variable_index() == i));
    }

    #[test]
    fn parse_and_masks() {
        assert!("XIY".parse::<PauliString>().is_err());
        let y: PauliString = "YIY".parse().unwrap();
        assert_eq!(y.flip_mask(), 0b101);
        assert_eq!(y.phase_mask(), 0b101);
        assert_eq!(y.y_count(), 2);
        let z: PauliString = "IZZ".parse().unwrap();
        assert_eq!(z.flip_mask(), 0);
        assert_eq!(z.phase_mask(), 0b011);
        assert!("III".parse::<PauliString>().is_err());
        assert!("IQX".parse::<PauliString>().is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(9, 4), 126);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(5, 0), 1);
    }
}
