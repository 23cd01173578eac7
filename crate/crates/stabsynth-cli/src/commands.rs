//! Command implementations. Each returns what the binary prints, so tests can
//! drive them without spawning a process.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabsynth::clifford::{
    is_lnn_legal, is_symplectic, random_clifford_word, two_qubit_depth, Circuit, LayeredCircuit, SymplecticMat,
};
use stabsynth::f2linalg::BinMatrix;
use stabsynth::lnn::pipeline_lnn;
use stabsynth::oracle::{optimal_cost, optimize_cz_stage, table1_row, GateKind, SearchSpec};
use stabsynth::phasepoly::{fold, PczcOrder};
use stabsynth::synthesis::{nine_stage, random_symplectic, seven_stage, weyl_cell};

use crate::format::{parse_circuit, parse_matrix, write_circuit, write_layered, write_matrix, ParseError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    Malformed(String),
    Semantic(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Semantic(_) => 1,
            CliError::Malformed(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Malformed(m) => write!(f, "malformed input: {m}"),
            CliError::Semantic(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<stabsynth::Error> for CliError {
    fn from(e: stabsynth::Error) -> Self {
        match e {
            stabsynth::Error::Internal(m) => CliError::Internal(m),
            e => CliError::Semantic(e.to_string()),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Malformed(e.to_string())
    }
}

/// `stdout` is the command's product; `report` goes to stderr.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub report: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String, report: String) -> Self {
        Outcome { stdout, report, code: 0 }
    }
}

type Res = Result<Outcome, CliError>;

pub fn load_tableau(text: &str) -> Result<SymplecticMat, CliError> {
    let m = parse_matrix(text)?;
    if !is_symplectic(&m).unwrap_or(false) {
        return Err(CliError::Malformed("matrix is not symplectic".into()));
    }
    SymplecticMat::new(m).map_err(|e| CliError::Malformed(e.to_string()))
}

fn check(c: &Circuit, m: &SymplecticMat) -> Result<(), CliError> {
    if c.to_symplectic() != *m {
        return Err(CliError::Internal("synthesized circuit does not match the input".into()));
    }
    Ok(())
}

fn layered_report(l: &LayeredCircuit) -> String {
    let tags: Vec<String> = l.tags().iter().map(|t| t.to_string()).collect();
    let flat = l.flatten();
    format!(
        "stages {}\ntwo-qubit gates {}\ndepth {}\n",
        tags.join("-"),
        flat.two_qubit_count(),
        two_qubit_depth(&flat)
    )
}

pub fn synth(matrix: &str, stages: u8, lnn: bool) -> Res {
    let m = load_tableau(matrix)?;
    let n = m.n();
    if lnn {
        let c = pipeline_lnn(&m)?;
        check(&c, &m)?;
        let budget = (14 * n).saturating_sub(4);
        let d = two_qubit_depth(&c);
        let report = format!(
            "lnn {}\ntwo-qubit gates {}\ndepth {d} <= {budget} (14n-4)\n",
            is_lnn_legal(&c),
            c.two_qubit_count()
        );
        return Ok(Outcome::ok(write_circuit(&c), report));
    }
    let l = match stages {
        7 => seven_stage(&m)?,
        9 => nine_stage(&m)?,
        s => return Err(CliError::Malformed(format!("stage count {s} is not 7 or 9"))),
    };
    check(&l.flatten(), &m)?;
    Ok(Outcome::ok(write_layered(&l), layered_report(&l)))
}

pub fn verify(circuit: &str, matrix: &str) -> Res {
    let c = parse_circuit(circuit)?;
    let m = parse_matrix(matrix)?;
    if m.rows() != 2 * c.n {
        return Ok(Outcome {
            stdout: format!("mismatch: circuit has {} qubits, matrix has {}\n", c.n, m.rows() / 2),
            report: String::new(),
            code: 1,
        });
    }
    let got = c.to_symplectic();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if got.matrix().get(i, j) != m.get(i, j) {
                return Ok(Outcome {
                    stdout: format!(
                        "mismatch at row {i} column {j}: circuit {} matrix {}\n",
                        got.matrix().get(i, j) as u8,
                        m.get(i, j) as u8
                    ),
                    report: String::new(),
                    code: 1,
                });
            }
        }
    }
    Ok(Outcome::ok("ok\n".into(), String::new()))
}

pub fn fold_cmd(circuit: &str, order: &str) -> Res {
    let c = parse_circuit(circuit)?;
    let order: PczcOrder = order.parse().map_err(|e: stabsynth::Error| CliError::Malformed(e.to_string()))?;
    let l = fold(&c, order)?;
    check(&l.flatten(), &c.to_symplectic())?;
    Ok(Outcome::ok(write_layered(&l), layered_report(&l)))
}

pub fn depth(circuit: &str) -> Res {
    let c = parse_circuit(circuit)?;
    let out = format!(
        "depth {}\ntwo-qubit gates {}\nlnn {}\n",
        two_qubit_depth(&c),
        c.two_qubit_count(),
        is_lnn_legal(&c)
    );
    Ok(Outcome::ok(out, String::new()))
}

fn perm_string(p: &[usize]) -> String {
    if p.iter().enumerate().all(|(i, &v)| i == v) {
        return "identity".into();
    }
    p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn cell(matrix: &str) -> Res {
    let m = load_tableau(matrix)?;
    let c = weyl_cell(&m)?;
    let out = format!(
        "k={}\npi={}\nsigma={}\ntau={}\n",
        c.k,
        perm_string(&c.pi()),
        perm_string(&c.sigma),
        perm_string(&c.tau)
    );
    Ok(Outcome::ok(out, String::new()))
}

/// A random Clifford word, or with `cell` a tableau drawn through a random
/// Bruhat cell (not uniform over the group).
/// `tableau` selects matrix output for words.
pub fn random(n: usize, seed: u64, length: Option<usize>, tableau: bool, cell: bool) -> Res {
    if cell {
        let m = random_symplectic(n, &mut ChaCha8Rng::seed_from_u64(seed));
        return Ok(Outcome::ok(write_matrix(m.matrix()), String::new()));
    }
    let c = random_clifford_word(n, length.unwrap_or(10 * n), seed);
    let out = if tableau { write_matrix(c.to_symplectic().matrix()) } else { write_circuit(&c) };
    Ok(Outcome::ok(out, String::new()))
}

pub fn oracle_table1(n: usize) -> Res {
    let r = table1_row(n)?;
    let (a, b, c, d) = r.values();
    let report = format!(
        "cz_only {:?}\ncz_full {:?}\nc_cnot {:?}\nc_full {:?}\n",
        r.cz_only.provenance, r.cz_full.provenance, r.c_cnot.provenance, r.c_full.provenance
    );
    Ok(Outcome::ok(format!("{a} {b} {c} {d}\n"), report))
}

fn gate_kind(s: &str) -> Result<GateKind, CliError> {
    Ok(match s.trim() {
        "H" => GateKind::H,
        "P" => GateKind::P,
        "CNOT" => GateKind::Cnot,
        "CZ" => GateKind::Cz,
        "SWAP" => GateKind::Swap,
        k => return Err(CliError::Malformed(format!("unknown gate kind {k:?}"))),
    })
}

pub fn oracle_cost(matrix: &str, alphabet: &[String]) -> Res {
    let m = load_tableau(matrix)?;
    let kinds = alphabet.iter().map(|s| gate_kind(s)).collect::<Result<Vec<_>, _>>()?;
    let cost = optimal_cost(&SearchSpec::new(&kinds, m))?;
    Ok(Outcome::ok(format!("{cost}\n"), String::new()))
}

pub fn czopt(matrix: &str) -> Res {
    let m = load_tableau(matrix)?;
    let n = m.n();
    if !m.a().is_identity() || !m.d().is_identity() || !m.c().is_zero() {
        return Err(CliError::Semantic("matrix is not a CZ stage [[I,B],[0,I]]".into()));
    }
    let b: BinMatrix = m.b();
    let c = optimize_cz_stage(&b)?;
    check(&c, &m)?;
    let naive = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| b.get(i, j)).count();
    let report = format!("two-qubit gates {} (plain CZ: {naive})\n", c.two_qubit_count());
    Ok(Outcome::ok(write_circuit(&c), report))
}
