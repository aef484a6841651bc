//! Hamiltonians as sums of Pauli tensor products.
//!
//! Input language, whitespace-insensitive:
//!
//! ```text
//! hamiltonian := sign? term (sign term)*
//! term        := real '*' labels
//! labels      := [IXYZ]+
//! sign        := '+' | '-'
//! ```
//!
//! The leftmost label is the outermost Kronecker factor, so `ZI` acts on the
//! first qubit and basis index `2*q0 + q1` orders states as `|00>, |01>, |10>, |11>`.

use std::fmt;

use nalgebra::DMatrix;

use crate::{Error, HermitianOperator, Result, C64};

/// Largest register built by default (`2^12 = 4096` levels).
pub const DEFAULT_QUBIT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Self::I),
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    /// Entries of the 2×2 matrix, row-major.
    fn entries(self) -> [C64; 4] {
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Self::I => [one, o, o, one],
            Self::X => [o, one, one, o],
            Self::Y => [o, -i, i, o],
            Self::Z => [one, o, o, -one],
        }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub labels: Vec<PauliLabel>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, labels: Vec<PauliLabel>) -> Self {
        Self {
            coefficient,
            labels,
        }
    }

    /// Builds a term from a label string such as `"XY"`.
    ///
    /// Panics on characters outside `IXYZ`; use [`parse_hamiltonian`] for
    /// untrusted input.
    pub fn from_str_labels(coefficient: f64, labels: &str) -> Self {
        let labels = labels
            .chars()
            .map(|c| PauliLabel::from_char(c).expect("label must be one of I, X, Y, Z"))
            .collect();
        Self::new(coefficient, labels)
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*", self.coefficient)?;
        for l in &self.labels {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

pub fn pauli_matrix(label: PauliLabel) -> HermitianOperator {
    HermitianOperator::from_matrix_unchecked(DMatrix::from_row_slice(2, 2, &label.entries()))
}

/// `coefficient * (sigma_0 ⊗ sigma_1 ⊗ ...)` with the default qubit cap.
pub fn tensor_term(term: &PauliTerm) -> Result<HermitianOperator> {
    tensor_term_capped(term, DEFAULT_QUBIT_CAP)
}

pub fn tensor_term_capped(term: &PauliTerm, max_qubits: usize) -> Result<HermitianOperator> {
    let n = term.num_qubits();
    if n == 0 {
        return Err(Error::Syntax {
            position: 0,
            message: "term has no labels".into(),
        });
    }
    if n > max_qubits {
        return Err(Error::QubitCap {
            qubits: n,
            cap: max_qubits,
        });
    }
    if !term.coefficient.is_finite() {
        return Err(Error::NonFiniteCoefficient { term: 0 });
    }
    let mut acc = DMatrix::from_element(1, 1, C64::new(term.coefficient, 0.0));
    for &label in &term.labels {
        acc = acc.kronecker(pauli_matrix(label).matrix());
    }
    Ok(HermitianOperator::from_matrix_unchecked(acc))
}

/// Sums the tensor products of `terms`. All terms must have equal length.
pub fn hamiltonian_from_terms(terms: &[PauliTerm], max_qubits: usize) -> Result<HermitianOperator> {
    let first = terms.first().ok_or_else(|| Error::Syntax {
        position: 0,
        message: "empty Hamiltonian".into(),
    })?;
    let n = first.num_qubits();
    check_lengths(terms)?;
    if n > max_qubits {
        return Err(Error::QubitCap {
            qubits: n,
            cap: max_qubits,
        });
    }
    let dim = 1usize << n;
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    for (idx, term) in terms.iter().enumerate() {
        if !term.coefficient.is_finite() {
            return Err(Error::NonFiniteCoefficient { term: idx });
        }
        acc += tensor_term_capped(term, max_qubits)?.into_matrix();
    }
    Ok(HermitianOperator::from_matrix_unchecked(acc))
}

fn check_lengths(terms: &[PauliTerm]) -> Result<()> {
    let Some(first) = terms.first() else {
        return Ok(());
    };
    let expected = first.num_qubits();
    for (term, t) in terms.iter().enumerate() {
        if t.num_qubits() != expected {
            return Err(Error::MixedLabelLength {
                term,
                expected,
                found: t.num_qubits(),
            });
        }
    }
    Ok(())
}

/// The two-qubit model
/// `C1 Z⊗I + C2 X⊗I + C3 Y⊗I + C4 Y⊗Y + C5 X⊗Y`
/// in the basis `(a, b, c, d) = (|00>, |01>, |10>, |11>)`.
///
/// The last two terms are the entangling ones.
pub fn build_two_qubit_hamiltonian(c: [f64; 5]) -> HermitianOperator {
    let terms = two_qubit_terms(c);
    hamiltonian_from_terms(&terms, 2).expect("fixed two-qubit terms are well formed")
}

pub fn two_qubit_terms(c: [f64; 5]) -> Vec<PauliTerm> {
    ["ZI", "XI", "YI", "YY", "XY"]
        .iter()
        .zip(c)
        .map(|(labels, coeff)| PauliTerm::from_str_labels(coeff, labels))
        .collect()
}

/// Renders terms in the input language; `parse_hamiltonian` reads it back
/// to the same terms.
pub fn format_hamiltonian(terms: &[PauliTerm]) -> String {
    let mut out = String::new();
    for (idx, t) in terms.iter().enumerate() {
        let negative = t.coefficient.is_sign_negative();
        let magnitude = t.coefficient.abs();
        match (idx, negative) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&format!("{magnitude}*"));
        out.extend(t.labels.iter().map(|l| l.as_char()));
    }
    out
}

pub fn parse_hamiltonian(text: &str) -> Result<Vec<PauliTerm>> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut terms = Vec::new();
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty Hamiltonian"));
    }
    let mut sign = p.sign().unwrap_or(1.0);
    loop {
        p.skip_ws();
        let term = p.term(sign)?;
        if let Some(prev) = terms.first().map(|t: &PauliTerm| t.num_qubits()) {
            if term.num_qubits() != prev {
                return Err(Error::MixedLabelLength {
                    term: terms.len(),
                    expected: prev,
                    found: term.num_qubits(),
                });
            }
        }
        terms.push(term);
        p.skip_ws();
        if p.at_end() {
            break;
        }
        sign = p.sign().ok_or_else(|| p.error("expected `+` or `-` between terms"))?;
    }
    Ok(terms)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn sign(&mut self) -> Option<f64> {
        let s = match self.peek()? {
            b'+' => 1.0,
            b'-' => -1.0,
            _ => return None,
        };
        self.pos += 1;
        Some(s)
    }

    fn term(&mut self, sign: f64) -> Result<PauliTerm> {
        let coefficient = sign * self.number()?;
        self.skip_ws();
        if self.peek() != Some(b'*') {
            return Err(self.error("expected `*` after coefficient"));
        }
        self.pos += 1;
        self.skip_ws();
        let mut labels = Vec::new();
        while let Some(l) = self.peek().and_then(|b| PauliLabel::from_char(b as char)) {
            labels.push(l);
            self.pos += 1;
        }
        if labels.is_empty() {
            return Err(self.error("expected Pauli labels (I, X, Y, Z)"));
        }
        if self.peek().is_some_and(|b| b.is_ascii_alphanumeric()) {
            return Err(self.error("unexpected character in Pauli labels"));
        }
        Ok(PauliTerm::new(coefficient, labels))
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|b| b.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut mantissa = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            mantissa += digits(self);
        }
        if mantissa == 0 {
            self.pos = start;
            return Err(self.error("expected a real coefficient"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.error("malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        text.parse::<f64>().map_err(|_| Error::Syntax {
            position: start,
            message: format!("invalid number `{text}`"),
        })
    }
}
