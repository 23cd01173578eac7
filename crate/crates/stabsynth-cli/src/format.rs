//! Text formats.
//!
//! Circuit files start with `qubits N` and hold one gate per line
//! (`H q`, `P q`, `PDG q`, `Z q`, `CNOT c t`, `CZ a b`, `SWAP a b`). Matrix
//! files start with `n N` followed by `2N` rows of `2N` bits. In both, `#`
//! starts a comment; a comment of the form `# stage X` marks a stage boundary.

use std::fmt;

use stabsynth::clifford::{Circuit, Gate, LayeredCircuit, StageTag};
use stabsynth::f2linalg::BinMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based; 0 when the problem is the file as a whole.
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.msg)
        } else {
            write!(f, "line {}: {}", self.line, self.msg)
        }
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

enum Line<'a> {
    Blank,
    Stage(&'a str),
    Tokens(Vec<&'a str>),
}

fn classify(raw: &str) -> Line<'_> {
    let (body, comment) = match raw.find('#') {
        Some(i) => (&raw[..i], Some(&raw[i + 1..])),
        None => (raw, None),
    };
    let tokens: Vec<&str> = body.split_whitespace().collect();
    if !tokens.is_empty() {
        return Line::Tokens(tokens);
    }
    match comment.map(|c| c.split_whitespace().collect::<Vec<_>>()) {
        Some(c) if c.len() == 2 && c[0] == "stage" => Line::Stage(c[1]),
        _ => Line::Blank,
    }
}

fn header(tokens: &[&str], key: &str, line: usize) -> Result<usize, ParseError> {
    match tokens {
        [k, v] if *k == key => v.parse().or_else(|_| err(line, format!("bad qubit count {v:?}"))),
        _ => err(line, format!("expected header \"{key} N\"")),
    }
}

fn parse_gate(tokens: &[&str], n: usize, line: usize) -> Result<Gate, ParseError> {
    let idx = |s: &str| s.parse::<usize>().or_else(|_| err(line, format!("bad qubit index {s:?}")));
    let g = match tokens {
        [op, q] => {
            let q = idx(q)?;
            match *op {
                "H" => Gate::H(q),
                "P" => Gate::P(q, 1),
                "Z" => Gate::P(q, 2),
                "PDG" => Gate::P(q, 3),
                _ => return err(line, format!("unknown single-qubit gate {op:?}")),
            }
        }
        [op, a, b] => {
            let (a, b) = (idx(a)?, idx(b)?);
            match *op {
                "CNOT" => Gate::Cnot(a, b),
                "CZ" => Gate::Cz(a, b),
                "SWAP" => Gate::Swap(a, b),
                _ => return err(line, format!("unknown two-qubit gate {op:?}")),
            }
        }
        _ => return err(line, format!("cannot parse gate {:?}", tokens.join(" "))),
    };
    g.validate(n).or_else(|e| err(line, e.to_string()))?;
    Ok(g)
}

/// Parses a circuit file, keeping stage markers. Gates before the first
/// marker form an untagged prefix.
pub fn parse_layered(text: &str) -> Result<(Circuit, LayeredCircuit), ParseError> {
    let mut n = None;
    let mut flat = Circuit::new(0);
    let mut layered = LayeredCircuit::new(0);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        match (classify(raw), n) {
            (Line::Blank, _) => {}
            (Line::Stage(_), None) => return err(line, "stage marker before header"),
            (Line::Stage(tag), Some(n)) => {
                let tag: StageTag = tag.parse().or_else(|_| err(line, format!("unknown stage {tag:?}")))?;
                layered.push(tag, Circuit::new(n));
            }
            (Line::Tokens(t), None) => {
                let q = header(&t, "qubits", line)?;
                n = Some(q);
                flat = Circuit::new(q);
                layered = LayeredCircuit::new(q);
            }
            (Line::Tokens(t), Some(n)) => {
                let g = parse_gate(&t, n, line)?;
                flat.push(g);
                if let Some((_, c)) = layered.stages.last_mut() {
                    c.push(g);
                }
            }
        }
    }
    if n.is_none() {
        return err(0, "missing \"qubits N\" header");
    }
    Ok((flat, layered))
}

pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    parse_layered(text).map(|(c, _)| c)
}

pub fn write_circuit(c: &Circuit) -> String {
    let mut s = format!("qubits {}\n", c.n);
    for g in &c.gates {
        s += &format!("{g}\n");
    }
    s
}

pub fn write_layered(l: &LayeredCircuit) -> String {
    let mut s = format!("qubits {}\n", l.n);
    for (tag, c) in &l.stages {
        s += &format!("# stage {tag}\n");
        for g in &c.gates {
            s += &format!("{g}\n");
        }
    }
    s
}

pub fn parse_matrix(text: &str) -> Result<BinMatrix, ParseError> {
    let mut n = None;
    let mut rows: Vec<Vec<u8>> = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Line::Tokens(t) = classify(raw) else { continue };
        let Some(n) = n else {
            n = Some(header(&t, "n", line)?);
            continue;
        };
        if t.len() != 2 * n {
            return err(line, format!("expected {} entries, found {}", 2 * n, t.len()));
        }
        let row = t
            .iter()
            .map(|v| match *v {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => err(line, format!("entry {v:?} is not 0 or 1")),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        rows.push(row);
    }
    let Some(n) = n else { return err(0, "missing \"n N\" header") };
    if rows.len() != 2 * n {
        return err(0, format!("expected {} rows, found {}", 2 * n, rows.len()));
    }
    if n == 0 {
        return Ok(BinMatrix::zeros(0, 0));
    }
    Ok(BinMatrix::from_rows(&rows))
}

pub fn write_matrix(m: &BinMatrix) -> String {
    let mut s = format!("n {}\n", m.rows() / 2);
    for i in 0..m.rows() {
        let row: Vec<&str> = (0..m.cols()).map(|j| if m.get(i, j) { "1" } else { "0" }).collect();
        s += &row.join(" ");
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circuit_round_trip() {
        let text = "qubits 3\nH 0\nP 1\nZ 2\nPDG 0\nCNOT 0 1\nCZ 1 2\nSWAP 0 2\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.gates.len(), 7);
        assert_eq!(write_circuit(&c), text);
    }

    #[test]
    fn whitespace_and_comments() {
        let c = parse_circuit("# a comment\n  qubits   2 \n\n CNOT  0   1 # trailing\n").unwrap();
        assert_eq!(c.gates, vec![Gate::Cnot(0, 1)]);
    }

    #[test]
    fn stage_markers() {
        let (flat, l) = parse_layered("qubits 2\n# stage C\nCNOT 0 1\n# stage P\n# stage CZ\nCZ 0 1\n").unwrap();
        assert_eq!(flat.gates.len(), 2);
        assert_eq!(l.tags(), vec![StageTag::C, StageTag::P, StageTag::Cz]);
        assert_eq!(write_layered(&l), "qubits 2\n# stage C\nCNOT 0 1\n# stage P\n# stage CZ\nCZ 0 1\n");
    }

    #[test]
    fn circuit_errors() {
        assert_eq!(parse_circuit("H 0\n").unwrap_err().line, 1);
        assert_eq!(parse_circuit("").unwrap_err().line, 0);
        assert_eq!(parse_circuit("qubits 2\nH 2\n").unwrap_err().line, 2);
        assert_eq!(parse_circuit("qubits 2\nCNOT 1 1\n").unwrap_err().line, 2);
        assert_eq!(parse_circuit("qubits 2\nT 0\n").unwrap_err().line, 2);
        assert_eq!(parse_circuit("qubits x\n").unwrap_err().line, 1);
    }

    #[test]
    fn matrix_round_trip() {
        let text = "n 1\n0 1\n1 0\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m, BinMatrix::from_rows(&[[0, 1], [1, 0]]));
        assert_eq!(write_matrix(&m), text);
        assert!(parse_matrix("n 1\n0 1\n").is_err());
        assert!(parse_matrix("n 1\n0 2\n1 0\n").is_err());
        assert!(parse_matrix("n 1\n0 1 1\n1 0\n").is_err());
    }
}
