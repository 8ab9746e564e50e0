//! The built-in codes, the extraction protocols built on them, and syndrome
//! matrices.
//!
//! CSS codes are analysed one sector at a time: X errors against the Z-type
//! measurements. The X and Z sectors are identical by symmetry, so per-sector
//! failure rates and costs are the headline numbers.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::decode::{DecodePolicy, Decoder, Flips};
use crate::designs::{self, BlockDesign, DesignError};
use crate::pauli::{self, Pauli, PauliError, PauliOperator, StabilizerGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("unknown code {0:?}")]
    UnknownCode(String),
    #[error("unknown protocol kind {0:?}")]
    UnknownKind(String),
    #[error("protocol {kind} is not defined for code {code}")]
    UndefinedProtocol { code: String, kind: ProtocolKind },
    #[error("alphabet {alphabet} is inconsistent with code {code}")]
    InconsistentAlphabet { code: String, alphabet: Alphabet },
    #[error("measured operator {0} is not in the stabilizer group")]
    NotAStabilizer(String),
    #[error("design blocks must have even size to commute with the all-X logical")]
    OddBlocks,
    #[error("classification failed: {0}")]
    Unclassifiable(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// Only bit flips occur; Z-type stabilizers only.
    SingleSectorBitflip,
    /// CSS code analysed on its X-error / Z-measurement sector.
    CssSector,
    NonCss,
}

/// Single-qubit error classes the noise model draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    XOnly,
    /// X, Y or Z, each with a third of the qubit error probability.
    Depolarizing,
}

impl Alphabet {
    pub fn paulis(self) -> &'static [Pauli] {
        match self {
            Alphabet::XOnly => &[Pauli::X],
            Alphabet::Depolarizing => &[Pauli::X, Pauli::Y, Pauli::Z],
        }
    }

    /// Number of single-qubit states including the identity.
    pub fn radix(self) -> usize {
        self.paulis().len() + 1
    }

    /// The `index`-th error pattern: base-`radix` digits, qubit 0 least
    /// significant, digit 0 is the identity.
    pub fn pattern(self, n: usize, mut index: usize) -> PauliOperator {
        let radix = self.radix();
        let mut x = 0u64;
        let mut z = 0u64;
        for q in 0..n {
            let digit = index % radix;
            index /= radix;
            if digit > 0 {
                let p = PauliOperator::single(n, q, self.paulis()[digit - 1]);
                x |= p.x_bits();
                z |= p.z_bits();
            }
        }
        PauliOperator::from_masks(n, x, z).expect("pattern within register")
    }

    pub fn pattern_count(self, n: usize) -> usize {
        self.radix().pow(n as u32)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alphabet::XOnly => "x",
            Alphabet::Depolarizing => "depolarizing",
        })
    }
}

impl FromStr for Alphabet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "x" | "x-only" | "bitflip" => Ok(Alphabet::XOnly),
            "depolarizing" | "xyz" | "depolarizing-xyz" => Ok(Alphabet::Depolarizing),
            other => Err(format!("unknown alphabet {other:?} (expected x or depolarizing)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    name: String,
    n: usize,
    sector: Sector,
    generators: Vec<PauliOperator>,
    group: StabilizerGroup,
    logicals: (PauliOperator, PauliOperator),
    distance: usize,
}

fn ops(strings: &[&str]) -> Vec<PauliOperator> {
    strings.iter().map(|s| s.parse().expect("literal Pauli")).collect()
}

impl Code {
    fn assemble(
        name: &str,
        sector: Sector,
        generators: Vec<PauliOperator>,
        distance: usize,
    ) -> Result<Self, CodeError> {
        let n = generators[0].n_qubits();
        let group = pauli::enumerate_group(&generators)?;
        let all = (1u64 << n) - 1;
        Ok(Self {
            name: name.to_string(),
            n,
            sector,
            generators,
            group,
            logicals: (PauliOperator::x_on(n, all), PauliOperator::z_on(n, all)),
            distance,
        })
    }

    /// Code whose Z-type stabilizers are the blocks of `design`. When blocks
    /// meet pairwise in even sets the X-type copies join the group and the
    /// code is CSS, analysed in its Z sector. The distance is the lightest
    /// undetected X error outside the group.
    pub fn from_design(name: &str, design: &BlockDesign) -> Result<Self, CodeError> {
        if design.blocks().iter().any(|b| b.count_ones() % 2 == 1) {
            return Err(CodeError::OddBlocks);
        }
        let stabs = design.z_stabilizers();
        let blocks = design.blocks();
        let doubled = blocks
            .iter()
            .enumerate()
            .all(|(i, a)| blocks[i + 1..].iter().all(|b| (a & b).count_ones() % 2 == 0));
        let (sector, generators) = if doubled {
            (
                Sector::CssSector,
                stabs.iter().copied().chain(design.x_stabilizers()).collect(),
            )
        } else {
            (Sector::SingleSectorBitflip, stabs.clone())
        };
        let group = pauli::enumerate_group(&generators)?;
        let n = design.n_points();
        let distance = (1u64..1 << n)
            .map(|x| PauliOperator::x_on(n, x))
            .filter(|e| pauli::syndrome_unchecked(e, &stabs) == 0 && !group.contains(e))
            .map(|e| e.weight())
            .min()
            .unwrap_or(n);
        Self::assemble(name, sector, generators, distance)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn group(&self) -> &StabilizerGroup {
        &self.group
    }

    pub fn logicals(&self) -> (PauliOperator, PauliOperator) {
        self.logicals
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    /// Generators measured in the analysed sector: the Z-type ones for CSS
    /// codes, all of them otherwise.
    pub fn sector_generators(&self) -> Vec<PauliOperator> {
        match self.sector {
            Sector::CssSector => self.generators.iter().filter(|g| g.is_z_type()).copied().collect(),
            _ => self.generators.clone(),
        }
    }

    pub fn sector_group(&self) -> StabilizerGroup {
        pauli::enumerate_group(&self.sector_generators()).expect("sector generators commute")
    }

    pub fn default_alphabet(&self) -> Alphabet {
        match self.sector {
            Sector::NonCss => Alphabet::Depolarizing,
            _ => Alphabet::XOnly,
        }
    }

    /// Depolarizing noise needs X-type measurements to be visible, which only
    /// the non-CSS code measures in its single analysed sector.
    pub fn accepts_alphabet(&self, alphabet: Alphabet) -> bool {
        alphabet == Alphabet::XOnly || self.sector == Sector::NonCss
    }

    pub fn kinds(&self) -> Vec<ProtocolKind> {
        ProtocolKind::BUILTIN
            .into_iter()
            .filter(|k| kind_defined(self, *k))
            .collect()
    }
}

pub const CODE_NAMES: [&str; 3] = ["bitflip", "perfect5", "steane"];

pub fn builtin_code(name: &str) -> Result<Code, CodeError> {
    match name.to_ascii_lowercase().as_str() {
        "bitflip" => Code::assemble("bitflip", Sector::SingleSectorBitflip, ops(&["ZZI", "IZZ"]), 3),
        "perfect5" => Code::assemble(
            "perfect5",
            Sector::NonCss,
            ops(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]),
            3,
        ),
        "steane" => {
            // Three independent biplane blocks; their products give the other four.
            let blocks = [0b1110001u64, 0b1101010, 0b1011100];
            let mut gens: Vec<PauliOperator> = blocks.iter().map(|&b| PauliOperator::z_on(7, b)).collect();
            gens.extend(blocks.iter().map(|&b| PauliOperator::x_on(7, b)));
            Code::assemble("steane", Sector::CssSector, gens, 3)
        }
        other => Err(CodeError::UnknownCode(other.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    /// Generators, measured once.
    MinimalQec,
    /// Generators, two rounds plus a tie-break round per disagreeing stabilizer.
    FtRepeatQec,
    /// Generators plus their product.
    Mr,
    /// Every nontrivial element of the sector group.
    Dbr,
    /// Blocks of a user-supplied design.
    Design,
}

impl ProtocolKind {
    pub const BUILTIN: [ProtocolKind; 4] = [
        ProtocolKind::MinimalQec,
        ProtocolKind::FtRepeatQec,
        ProtocolKind::Mr,
        ProtocolKind::Dbr,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ProtocolKind::MinimalQec => "minimal",
            ProtocolKind::FtRepeatQec => "ft",
            ProtocolKind::Mr => "mr",
            ProtocolKind::Dbr => "dbr",
            ProtocolKind::Design => "design",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ProtocolKind {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "minimal" | "minimalqec" | "qec0" => Ok(ProtocolKind::MinimalQec),
            "ft" | "ftrepeat" | "ftrepeatqec" | "qec" => Ok(ProtocolKind::FtRepeatQec),
            "mr" => Ok(ProtocolKind::Mr),
            "dbr" => Ok(ProtocolKind::Dbr),
            "design" => Ok(ProtocolKind::Design),
            other => Err(CodeError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schedule {
    SingleRound,
    /// Two unconditional rounds; a stabilizer whose two results disagree is
    /// measured a third time; each stabilizer takes the majority of its results.
    RepeatMajority,
}

fn kind_defined(code: &Code, kind: ProtocolKind) -> bool {
    match kind {
        ProtocolKind::Mr => code.sector != Sector::SingleSectorBitflip,
        ProtocolKind::Design => false,
        _ => true,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protocol {
    code: Arc<Code>,
    kind: ProtocolKind,
    measured: Vec<PauliOperator>,
    schedule: Schedule,
    alphabet: Alphabet,
}

pub fn build_protocol(code: &Code, kind: ProtocolKind) -> Result<Protocol, CodeError> {
    if !kind_defined(code, kind) {
        return Err(CodeError::UndefinedProtocol {
            code: code.name.clone(),
            kind,
        });
    }
    let gens = code.sector_generators();
    let measured = match kind {
        ProtocolKind::MinimalQec | ProtocolKind::FtRepeatQec => gens,
        ProtocolKind::Mr => {
            let product = gens
                .iter()
                .fold(PauliOperator::identity(code.n), |acc, g| acc.mul_unchecked(g));
            let mut m = gens;
            m.push(product);
            m
        }
        ProtocolKind::Dbr => code.sector_group().nontrivial().to_vec(),
        ProtocolKind::Design => unreachable!(),
    };
    let schedule = if kind == ProtocolKind::FtRepeatQec {
        Schedule::RepeatMajority
    } else {
        Schedule::SingleRound
    };
    Ok(Protocol {
        code: Arc::new(code.clone()),
        kind,
        measured,
        schedule,
        alphabet: code.default_alphabet(),
    })
}

/// Convenience: `builtin_code(code)` then `build_protocol`.
pub fn builtin_protocol(code: &str, kind: ProtocolKind) -> Result<Protocol, CodeError> {
    build_protocol(&builtin_code(code)?, kind)
}

impl Protocol {
    /// Single-round protocol measuring the design's blocks as Z-type
    /// stabilizers against bit flips.
    pub fn from_design(name: &str, design: &BlockDesign) -> Result<Self, CodeError> {
        let code = Code::from_design(name, design)?;
        Ok(Self {
            measured: design.z_stabilizers(),
            code: Arc::new(code),
            kind: ProtocolKind::Design,
            schedule: Schedule::SingleRound,
            alphabet: Alphabet::XOnly,
        })
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Result<Self, CodeError> {
        if !self.code.accepts_alphabet(alphabet) {
            return Err(CodeError::InconsistentAlphabet {
                code: self.code.name.clone(),
                alphabet,
            });
        }
        self.alphabet = alphabet;
        Ok(self)
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn measured(&self) -> &[PauliOperator] {
        &self.measured
    }

    pub fn m(&self) -> usize {
        self.measured.len()
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn n_qubits(&self) -> usize {
        self.code.n
    }

    /// `code-kind`, e.g. `steane-dbr`.
    pub fn label(&self) -> String {
        format!("{}_{}", self.code.name, self.kind)
    }

    /// Ideal (noise-free) syndrome of `error`.
    pub fn syndrome_of(&self, error: &PauliOperator) -> u64 {
        pauli::syndrome_unchecked(error, &self.measured)
    }

    /// Number of measurements a given flip record implies.
    pub fn performed(&self, flips: &Flips) -> usize {
        match (self.schedule, flips) {
            (Schedule::SingleRound, _) => self.m(),
            (Schedule::RepeatMajority, Flips::Repeated { first, second, .. }) => {
                2 * self.m() + (first ^ second).count_ones() as usize
            }
            (Schedule::RepeatMajority, Flips::Single(_)) => 2 * self.m(),
        }
    }
}

impl fmt::Display for Protocol {
    /// `code`, `kind` and `alphabet` lines, then one `measure` line per
    /// operator. Design-derived protocols print their block supports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "code {}", self.code.name)?;
        writeln!(f, "kind {}", self.kind)?;
        writeln!(f, "alphabet {}", self.alphabet)?;
        for m in &self.measured {
            writeln!(f, "measure {m}")?;
        }
        Ok(())
    }
}

impl FromStr for Protocol {
    type Err = CodeError;

    /// Accepts the printed form for built-in codes. The measured list may
    /// differ from the built-in one but must consist of stabilizers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut code = None;
        let mut kind = None;
        let mut alphabet = None;
        let mut measured = Vec::new();
        for (idx, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CodeError::Parse { line: idx + 1, msg };
            let (key, value) = line
                .split_once(char::is_whitespace)
                .map(|(k, v)| (k, v.trim()))
                .ok_or_else(|| err(format!("expected `<key> <value>`, got {line:?}")))?;
            match key {
                "code" => code = Some(builtin_code(value).map_err(|e| err(e.to_string()))?),
                "kind" => kind = Some(value.parse::<ProtocolKind>().map_err(|e| err(e.to_string()))?),
                "alphabet" => alphabet = Some(value.parse::<Alphabet>().map_err(err)?),
                "measure" => measured.push(value.parse::<PauliOperator>().map_err(|e| err(e.to_string()))?),
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        let missing = |what: &str| CodeError::Parse {
            line: s.lines().count().max(1),
            msg: format!("missing `{what}` line"),
        };
        let code = code.ok_or_else(|| missing("code"))?;
        let kind = kind.ok_or_else(|| missing("kind"))?;
        let mut protocol = build_protocol(&code, kind)?;
        if let Some(a) = alphabet {
            protocol = protocol.with_alphabet(a)?;
        }
        if !measured.is_empty() {
            for m in &measured {
                if m.n_qubits() != code.n || !code.group.contains(m) || m.is_identity() {
                    return Err(CodeError::NotAStabilizer(m.to_string()));
                }
            }
            protocol.measured = measured;
        }
        Ok(protocol)
    }
}

/// Ideal syndromes of the identity and every single-qubit error in an
/// alphabet, one column each. Column 0 is the no-error column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeMatrix {
    pub rows: usize,
    pub labels: Vec<String>,
    pub columns: Vec<u64>,
}

impl SyndromeMatrix {
    pub fn entry(&self, row: usize, col: usize) -> bool {
        self.columns[col] >> row & 1 == 1
    }

    pub fn column_weight(&self, col: usize) -> usize {
        self.columns[col].count_ones() as usize
    }

    pub fn column_distance(&self, a: usize, b: usize) -> usize {
        (self.columns[a] ^ self.columns[b]).count_ones() as usize
    }

    pub fn columns_distinct(&self) -> bool {
        let mut c = self.columns.clone();
        c.sort_unstable();
        c.windows(2).all(|w| w[0] != w[1])
    }

    /// Smallest pairwise distance among the error columns (no-error excluded).
    pub fn min_error_distance(&self) -> Option<usize> {
        let k = self.columns.len();
        (1..k)
            .flat_map(|a| ((a + 1)..k).map(move |b| (a, b)))
            .map(|(a, b)| self.column_distance(a, b))
            .min()
    }
}

impl fmt::Display for SyndromeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.labels.join(" "))?;
        for r in 0..self.rows {
            let row: Vec<String> = self
                .labels
                .iter()
                .enumerate()
                .map(|(c, label)| {
                    let v = if self.entry(r, c) { "-" } else { "+" };
                    format!("{v:>width$}", width = label.len())
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

pub fn syndrome_matrix(p: &Protocol, alphabet: Alphabet) -> Result<SyndromeMatrix, CodeError> {
    if !p.code.accepts_alphabet(alphabet) {
        return Err(CodeError::InconsistentAlphabet {
            code: p.code.name.clone(),
            alphabet,
        });
    }
    let n = p.n_qubits();
    let mut labels = vec!["I".to_string()];
    let mut columns = vec![0u64];
    for q in 0..n {
        for &pl in alphabet.paulis() {
            let e = PauliOperator::single(n, q, pl);
            labels.push(format!("{}{}", pl.as_char(), q + 1));
            columns.push(p.syndrome_of(&e));
        }
    }
    Ok(SyndromeMatrix {
        rows: p.m(),
        labels,
        columns,
    })
}

/// Design whose blocks are the supports of the protocol's measured operators.
pub fn measured_design(p: &Protocol) -> Result<BlockDesign, CodeError> {
    Ok(designs::supports_to_design(&p.measured)?)
}

/// `[[n, k, d, s]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassTag {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub s: usize,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{},{},{}]]", self.n, self.k, self.d, self.s)
    }
}

/// Finds the largest `s` such that every event with at most `(d - 1) / 2`
/// qubit errors and at most `s` measurement flips over the whole schedule is
/// corrected under the default policy.
pub fn classify(p: &Protocol) -> Result<ClassTag, CodeError> {
    let decoder = Decoder::new(p, DecodePolicy::default()).map_err(|e| CodeError::Unclassifiable(e.to_string()))?;
    let t = (p.code.distance - 1) / 2;
    let n = p.n_qubits();
    let errors: Vec<PauliOperator> = (0..p.alphabet.pattern_count(n))
        .map(|i| p.alphabet.pattern(n, i))
        .filter(|e| e.weight() <= t)
        .collect();
    let max_flips = match p.schedule {
        Schedule::SingleRound => p.m(),
        Schedule::RepeatMajority => 3 * p.m(),
    };
    for b in 0..=max_flips {
        let ok = flip_records_with_weight(p, b)
            .iter()
            .all(|f| errors.iter().all(|e| decoder.success_unchecked(e, f)));
        if !ok {
            if b == 0 {
                return Err(CodeError::Unclassifiable(format!(
                    "some error of weight <= {t} is not corrected even without measurement errors"
                )));
            }
            return Ok(ClassTag {
                n,
                k: 1,
                d: p.code.distance,
                s: b - 1,
            });
        }
    }
    Ok(ClassTag {
        n,
        k: 1,
        d: p.code.distance,
        s: max_flips,
    })
}

/// Every flip record of the protocol's schedule with exactly `b` flips.
pub fn flip_records_with_weight(p: &Protocol, b: usize) -> Vec<Flips> {
    let m = p.m();
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    match p.schedule {
        Schedule::SingleRound => subsets_of_weight(full, b).into_iter().map(Flips::Single).collect(),
        Schedule::RepeatMajority => {
            let mut out = Vec::new();
            for first_w in 0..=b.min(m) {
                for second_w in 0..=(b - first_w).min(m) {
                    let third_w = b - first_w - second_w;
                    for first in subsets_of_weight(full, first_w) {
                        for second in subsets_of_weight(full, second_w) {
                            let disagree = first ^ second;
                            for third in subsets_of_weight(disagree, third_w) {
                                out.push(Flips::Repeated { first, second, third });
                            }
                        }
                    }
                }
            }
            out
        }
    }
}

/// Subsets of `set` with exactly `k` elements, in increasing mask order.
pub(crate) fn subsets_of_weight(set: u64, k: usize) -> Vec<u64> {
    if k > set.count_ones() as usize {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut sub = set;
    loop {
        if sub.count_ones() as usize == k {
            out.push(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & set;
    }
    out.reverse();
    out
}
