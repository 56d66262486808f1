//! The relabeling polytope: canonical variables, the equality system whose
//! claimed vertex set is the permutation guesses, the cut equalities driven
//! by compatibility zeros, and the tour-weight objective.
//!
//! The orientation symmetry `x(i,j,mu,nu) = x(j,i,nu,mu)` is enforced by
//! identification: quadruples with `i > j` are rewritten to `(j,i,nu,mu)`
//! before storage, so no explicit symmetry rows exist. Cuts eliminate
//! variables instead of adding rows; eliminated variables are tracked so
//! point evaluation can report violations against them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compat::ZeroIndexSet;
use crate::graph::{standard_cycle, Permutation, WeightMatrix, MIN_VERTICES};
use crate::rational::{
    exact_decimal, format_rational, parse_rational, ExtRational, Rational,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("system size requires n >= 2, got {0}")]
    TooSmall(usize),
    #[error("cut index ({i}, {j}, {mu}, {nu}) is not a valid relabeling variable")]
    InvalidCutVariable { i: usize, j: usize, mu: usize, nu: usize },
    #[error("cut set size {cuts} does not match system size {system}")]
    CutSizeMismatch { cuts: usize, system: usize },
    #[error("objective coefficient on surviving variable {var} is infinite: weights and cuts are inconsistent")]
    InfiniteCoefficient { var: String },
    #[error("weight matrix size {weights} does not match system size {system}")]
    WeightSizeMismatch { weights: usize, system: usize },
    #[error("point size {point} does not match system size {system}")]
    PointSizeMismatch { point: usize, system: usize },
    #[error("coefficient {value} on `{var}` has no exact decimal expansion for lp-text")]
    InexactDecimal { var: String, value: String },
    #[error("variable reference {index} out of range ({count} variables)")]
    VarOutOfRange { index: usize, count: usize },
    #[error("malformed variable name `{0}`")]
    BadVarName(String),
    #[error("malformed system file: {0}")]
    BadSystemFile(String),
    #[error("malformed point file: {0}")]
    BadPointFile(String),
}

/// Canonical variable: a relabeling cell `x(i,j,mu,nu)` stored with `i < j`,
/// or a vertex-choice cell `y(j,nu)`. All fields 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarIndex {
    X { i: usize, j: usize, mu: usize, nu: usize },
    Y { j: usize, nu: usize },
}

impl VarIndex {
    /// Canonicalizing constructor. Panics on `i == j` or `mu == nu`, which
    /// never name variables.
    pub fn x(i: usize, j: usize, mu: usize, nu: usize) -> VarIndex {
        assert_ne!(i, j, "x variables need distinct positions");
        assert_ne!(mu, nu, "x variables need distinct vertices");
        if i < j {
            VarIndex::X { i, j, mu, nu }
        } else {
            VarIndex::X { i: j, j: i, mu: nu, nu: mu }
        }
    }

    pub fn y(j: usize, nu: usize) -> VarIndex {
        VarIndex::Y { j, nu }
    }

    pub fn is_x(&self) -> bool {
        matches!(self, VarIndex::X { .. })
    }

    /// External name with 1-based indices: `x_i_j_u_v` or `y_j_v`.
    pub fn name(&self) -> String {
        match *self {
            VarIndex::X { i, j, mu, nu } => {
                format!("x_{}_{}_{}_{}", i + 1, j + 1, mu + 1, nu + 1)
            }
            VarIndex::Y { j, nu } => format!("y_{}_{}", j + 1, nu + 1),
        }
    }

    /// Parses an external name, canonicalizing the orientation.
    pub fn parse(name: &str) -> Result<VarIndex, PolytopeError> {
        let bad = || PolytopeError::BadVarName(name.to_string());
        let fields: Vec<&str> = name.split('_').collect();
        let index = |s: &str| -> Result<usize, PolytopeError> {
            let v: usize = s.parse().map_err(|_| bad())?;
            if v == 0 {
                return Err(bad());
            }
            Ok(v - 1)
        };
        match fields.as_slice() {
            ["x", i, j, mu, nu] => {
                let (i, j, mu, nu) = (index(i)?, index(j)?, index(mu)?, index(nu)?);
                if i == j || mu == nu {
                    return Err(bad());
                }
                Ok(VarIndex::x(i, j, mu, nu))
            }
            ["y", j, nu] => Ok(VarIndex::y(index(j)?, index(nu)?)),
            _ => Err(bad()),
        }
    }

    fn in_range(&self, n: usize) -> bool {
        match *self {
            VarIndex::X { i, j, mu, nu } => i < n && j < n && mu < n && nu < n,
            VarIndex::Y { j, nu } => j < n && nu < n,
        }
    }
}

impl fmt::Display for VarIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// All canonical variables for size `n`: relabeling cells in lexicographic
/// order, then vertex-choice cells.
pub fn canonical_vars(n: usize) -> Vec<VarIndex> {
    let mut vars = Vec::with_capacity(n * n * (n - 1) * (n - 1) / 2 + n * n);
    for i in 0..n {
        for j in (i + 1)..n {
            for mu in 0..n {
                for nu in 0..n {
                    if mu != nu {
                        vars.push(VarIndex::X { i, j, mu, nu });
                    }
                }
            }
        }
    }
    for j in 0..n {
        for nu in 0..n {
            vars.push(VarIndex::Y { j, nu });
        }
    }
    vars
}

/// Provenance tag for a row; not part of system identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowLabel {
    /// Sum over source vertices inside box `(i, j)`, target column `nu`.
    BoxColumnTotal { i: usize, j: usize, nu: usize },
    /// Sum over positions `i` of cell `(mu, nu)` across block column `j`.
    CrossBoxTotal { j: usize, mu: usize, nu: usize },
    /// Each position picks exactly one vertex.
    PositionAssignment { j: usize },
    /// Row of an imported or synthetic system.
    Generic(usize),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowLabel::BoxColumnTotal { i, j, nu } => {
                write!(f, "box_col({},{};{})", i + 1, j + 1, nu + 1)
            }
            RowLabel::CrossBoxTotal { j, mu, nu } => {
                write!(f, "cross_box({};{},{})", j + 1, mu + 1, nu + 1)
            }
            RowLabel::PositionAssignment { j } => write!(f, "assign({})", j + 1),
            RowLabel::Generic(k) => write!(f, "row{}", k + 1),
        }
    }
}

/// One equality row: sparse coefficients over variable positions plus an
/// exact right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
    pub label: RowLabel,
}

/// Equality system with implicit nonnegativity on every variable and an
/// optional minimization objective.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    n: usize,
    vars: Vec<VarIndex>,
    positions: HashMap<VarIndex, usize>,
    rows: Vec<Row>,
    objective: Option<Vec<(usize, Rational)>>,
    eliminated: BTreeSet<VarIndex>,
}

impl PartialEq for LinearSystem {
    fn eq(&self, other: &Self) -> bool {
        // labels are diagnostic only
        self.n == other.n
            && self.vars == other.vars
            && self.eliminated == other.eliminated
            && self.objective == other.objective
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.coeffs == b.coeffs && a.rhs == b.rhs)
    }
}

impl Eq for LinearSystem {}

impl LinearSystem {
    pub fn from_parts(
        n: usize,
        vars: Vec<VarIndex>,
        rows: Vec<(Vec<(usize, Rational)>, Rational)>,
        objective: Option<Vec<(usize, Rational)>>,
    ) -> Result<LinearSystem, PolytopeError> {
        let count = vars.len();
        let check = |idx: usize| {
            if idx >= count {
                Err(PolytopeError::VarOutOfRange { index: idx, count })
            } else {
                Ok(())
            }
        };
        let mut built_rows = Vec::with_capacity(rows.len());
        for (k, (coeffs, rhs)) in rows.into_iter().enumerate() {
            for (idx, _) in &coeffs {
                check(*idx)?;
            }
            let mut coeffs = coeffs;
            coeffs.sort_by_key(|&(idx, _)| idx);
            built_rows.push(Row { coeffs, rhs, label: RowLabel::Generic(k) });
        }
        if let Some(obj) = &objective {
            for (idx, _) in obj {
                check(*idx)?;
            }
        }
        let positions = vars.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        Ok(LinearSystem {
            n,
            vars,
            positions,
            rows: built_rows,
            objective,
            eliminated: BTreeSet::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vars(&self) -> &[VarIndex] {
        &self.vars
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> Option<&[(usize, Rational)]> {
        self.objective.as_deref()
    }

    pub fn eliminated(&self) -> impl Iterator<Item = &VarIndex> {
        self.eliminated.iter()
    }

    pub fn is_eliminated(&self, var: &VarIndex) -> bool {
        self.eliminated.contains(var)
    }

    pub fn var_position(&self, var: &VarIndex) -> Option<usize> {
        self.positions.get(var).copied()
    }

    /// Exact objective value of a point, if an objective is attached.
    pub fn objective_value(&self, pt: &RationalPoint) -> Option<Rational> {
        self.objective.as_ref().map(|obj| {
            obj.iter().map(|(idx, c)| c * pt.get(&self.vars[*idx])).sum()
        })
    }
}

/// The guess-hull equality system over the canonical variables for size `n`.
/// Digraph-independent.
pub fn build_hull_system(n: usize) -> Result<LinearSystem, PolytopeError> {
    if n < MIN_VERTICES {
        return Err(PolytopeError::TooSmall(n));
    }
    let vars = canonical_vars(n);
    let expected_x = n * n * (n - 1) * (n - 1) / 2;
    assert_eq!(vars.len(), expected_x + n * n);
    let positions: HashMap<VarIndex, usize> =
        vars.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let pos = |v: VarIndex| positions[&v];

    let mut rows = Vec::with_capacity(2 * n * n * (n - 1) + n);
    // Box column totals: one row per ordered position pair and target column.
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for nu in 0..n {
                let mut coeffs: Vec<(usize, Rational)> = (0..n)
                    .filter(|&mu| mu != nu)
                    .map(|mu| (pos(VarIndex::x(i, j, mu, nu)), Rational::one()))
                    .collect();
                coeffs.push((pos(VarIndex::y(j, nu)), -Rational::one()));
                coeffs.sort_by_key(|&(idx, _)| idx);
                rows.push(Row {
                    coeffs,
                    rhs: Rational::zero(),
                    label: RowLabel::BoxColumnTotal { i, j, nu },
                });
            }
        }
    }
    let box_rows = rows.len();
    assert_eq!(box_rows, n * n * (n - 1));
    // Cross-box totals: one row per block column and cell.
    for j in 0..n {
        for mu in 0..n {
            for nu in 0..n {
                if mu == nu {
                    continue;
                }
                let mut coeffs: Vec<(usize, Rational)> = (0..n)
                    .filter(|&i| i != j)
                    .map(|i| (pos(VarIndex::x(i, j, mu, nu)), Rational::one()))
                    .collect();
                coeffs.push((pos(VarIndex::y(j, nu)), -Rational::one()));
                coeffs.sort_by_key(|&(idx, _)| idx);
                rows.push(Row {
                    coeffs,
                    rhs: Rational::zero(),
                    label: RowLabel::CrossBoxTotal { j, mu, nu },
                });
            }
        }
    }
    assert_eq!(rows.len() - box_rows, n * n * (n - 1));
    // Position assignments.
    for j in 0..n {
        let coeffs: Vec<(usize, Rational)> =
            (0..n).map(|nu| (pos(VarIndex::y(j, nu)), Rational::one())).collect();
        rows.push(Row { coeffs, rhs: Rational::one(), label: RowLabel::PositionAssignment { j } });
    }
    assert_eq!(rows.len(), 2 * n * n * (n - 1) + n);

    Ok(LinearSystem { n, vars, positions, rows, objective: None, eliminated: BTreeSet::new() })
}

/// Fixes every listed variable to zero by eliminating it from the system.
pub fn apply_cuts(sys: &LinearSystem, cuts: &ZeroIndexSet) -> Result<LinearSystem, PolytopeError> {
    if cuts.n() != sys.n {
        return Err(PolytopeError::CutSizeMismatch { cuts: cuts.n(), system: sys.n });
    }
    let mut to_cut: BTreeSet<VarIndex> = BTreeSet::new();
    for &(i, j, mu, nu) in cuts.quads() {
        if i == j || mu == nu || !(VarIndex::x(i, j, mu, nu)).in_range(sys.n) {
            return Err(PolytopeError::InvalidCutVariable {
                i: i + 1,
                j: j + 1,
                mu: mu + 1,
                nu: nu + 1,
            });
        }
        let var = VarIndex::x(i, j, mu, nu);
        if sys.var_position(&var).is_none() && !sys.is_eliminated(&var) {
            return Err(PolytopeError::InvalidCutVariable {
                i: i + 1,
                j: j + 1,
                mu: mu + 1,
                nu: nu + 1,
            });
        }
        to_cut.insert(var);
    }
    let vars: Vec<VarIndex> =
        sys.vars.iter().copied().filter(|v| !to_cut.contains(v)).collect();
    let positions: HashMap<VarIndex, usize> =
        vars.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let rows = sys
        .rows
        .iter()
        .map(|row| {
            let coeffs = row
                .coeffs
                .iter()
                .filter_map(|(idx, c)| positions.get(&sys.vars[*idx]).map(|&p| (p, c.clone())))
                .collect();
            Row { coeffs, rhs: row.rhs.clone(), label: row.label }
        })
        .collect();
    let objective = sys.objective.as_ref().map(|obj| {
        obj.iter()
            .filter_map(|(idx, c)| positions.get(&sys.vars[*idx]).map(|&p| (p, c.clone())))
            .collect()
    });
    let mut eliminated = sys.eliminated.clone();
    eliminated.extend(to_cut);
    Ok(LinearSystem { n: sys.n, vars, positions, rows, objective, eliminated })
}

/// Which subscript convention the tour objective uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveReading {
    /// Weights indexed by the relabeled vertex pair, restricted to pattern
    /// arcs: the objective of a guess equals its exact tour weight.
    Restricted,
    /// Weights indexed by the position pair as written: every guess then
    /// evaluates to the same constant. Kept to demonstrate that behavior.
    Literal,
}

impl fmt::Display for ObjectiveReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveReading::Restricted => write!(f, "restricted"),
            ObjectiveReading::Literal => write!(f, "literal"),
        }
    }
}

/// Attaches a minimization objective to a copy of `sys`.
///
/// Under the restricted reading the coefficient of `x(i,j,mu,nu)` collects
/// `w[mu][nu]` when the pattern has arc `i -> j` and `w[nu][mu]` when it has
/// `j -> i` (both fire only at n = 2, where the tour uses both arcs).
/// An infinite coefficient on a surviving variable is an error: with cuts
/// from a consistent weight/digraph pair it cannot happen.
pub fn build_objective(
    sys: &LinearSystem,
    w: &WeightMatrix,
    reading: ObjectiveReading,
) -> Result<LinearSystem, PolytopeError> {
    if w.n() != sys.n {
        return Err(PolytopeError::WeightSizeMismatch { weights: w.n(), system: sys.n });
    }
    let s = standard_cycle(sys.n).expect("system invariant guarantees n >= 2");
    let mut objective = Vec::new();
    for (posn, var) in sys.vars.iter().enumerate() {
        let &VarIndex::X { i, j, mu, nu } = var else { continue };
        let mut total = Rational::zero();
        let mut contributions: Vec<&ExtRational> = Vec::new();
        match reading {
            ObjectiveReading::Restricted => {
                if s.has_arc(i, j) {
                    contributions.push(w.get(mu, nu));
                }
                if s.has_arc(j, i) {
                    contributions.push(w.get(nu, mu));
                }
            }
            ObjectiveReading::Literal => {
                contributions.push(w.get(i, j));
                contributions.push(w.get(j, i));
            }
        }
        if contributions.is_empty() {
            continue;
        }
        for value in contributions {
            match value {
                ExtRational::Finite(r) => total += r,
                ExtRational::Infinite => {
                    return Err(PolytopeError::InfiniteCoefficient { var: var.name() })
                }
            }
        }
        if !total.is_zero() {
            objective.push((posn, total));
        }
    }
    let mut out = sys.clone();
    out.objective = Some(objective);
    Ok(out)
}

/// Exact assignment of rationals to canonical variables; absent means zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint {
    n: usize,
    values: BTreeMap<VarIndex, Rational>,
}

impl RationalPoint {
    pub fn zero(n: usize) -> RationalPoint {
        RationalPoint { n, values: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, var: &VarIndex) -> Rational {
        self.values.get(var).cloned().unwrap_or_else(Rational::zero)
    }

    /// Stores a value, dropping explicit zeros so the map is the support.
    pub fn set(&mut self, var: VarIndex, value: Rational) {
        if value.is_zero() {
            self.values.remove(&var);
        } else {
            self.values.insert(var, value);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (&VarIndex, &Rational)> {
        self.values.iter()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm_sq(&self) -> Rational {
        self.values.values().map(|v| v * v).sum()
    }

    /// Sorted JSON object of the nonzero values, keyed by variable name.
    pub fn to_json(&self) -> String {
        let mut map = serde_json::Map::new();
        for (var, value) in &self.values {
            map.insert(var.name(), serde_json::Value::String(format_rational(value)));
        }
        let doc = serde_json::json!({ "n": self.n, "values": serde_json::Value::Object(map) });
        serde_json::to_string_pretty(&doc).expect("point serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<RationalPoint, PolytopeError> {
        let bad = |msg: &str| PolytopeError::BadPointFile(msg.to_string());
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
        let n = doc
            .get("n")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| bad("missing integer field `n`"))? as usize;
        if n < MIN_VERTICES {
            return Err(bad("`n` below 2"));
        }
        let values = doc
            .get("values")
            .and_then(|v| v.as_object())
            .ok_or_else(|| bad("missing object field `values`"))?;
        let mut point = RationalPoint::zero(n);
        for (name, value) in values {
            let var = VarIndex::parse(name)?;
            if !var.in_range(n) {
                return Err(bad(&format!("variable `{name}` out of range for n = {n}")));
            }
            let token = value
                .as_str()
                .ok_or_else(|| bad(&format!("value of `{name}` must be a string")))?;
            let rational = parse_rational(token)
                .map_err(|e| bad(&format!("value of `{name}`: {e}")))?;
            point.set(var, rational);
        }
        Ok(point)
    }
}

/// The 0/1 point induced by a permutation: 1 on `x(i,j,p(i),p(j))` for every
/// position pair and on `y(j,p(j))` for every position.
pub fn guess_point(p: &Permutation) -> RationalPoint {
    let n = p.n();
    let mut point = RationalPoint::zero(n);
    for i in 0..n {
        for j in (i + 1)..n {
            point.set(VarIndex::x(i, j, p.apply(i), p.apply(j)), Rational::one());
        }
        point.set(VarIndex::y(i, p.apply(i)), Rational::one());
    }
    point
}

/// The uniform interior point: every `y` is `1/n`, every `x` is `1/(n(n-1))`.
pub fn center_point(n: usize) -> Result<RationalPoint, PolytopeError> {
    if n < MIN_VERTICES {
        return Err(PolytopeError::TooSmall(n));
    }
    let mut point = RationalPoint::zero(n);
    let x_value = Rational::new(1.into(), (n as i64 * (n as i64 - 1)).into());
    let y_value = Rational::new(1.into(), (n as i64).into());
    for var in canonical_vars(n) {
        match var {
            VarIndex::X { .. } => point.set(var, x_value.clone()),
            VarIndex::Y { .. } => point.set(var, y_value.clone()),
        }
    }
    Ok(point)
}

/// Exact per-row residuals plus nonnegativity and elimination checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualReport {
    pub row_count: usize,
    /// `(row index, lhs - rhs)` for rows with nonzero residual.
    pub nonzero_residuals: Vec<(usize, Rational)>,
    pub negative_values: Vec<(VarIndex, Rational)>,
    /// Nonzero values on variables the system eliminated.
    pub eliminated_nonzero: Vec<(VarIndex, Rational)>,
    pub objective_value: Option<Rational>,
    pub feasible: bool,
}

/// Evaluates `pt` against every row of `sys` in exact arithmetic. Variables
/// missing from the point count as zero.
pub fn evaluate_point(
    sys: &LinearSystem,
    pt: &RationalPoint,
) -> Result<ResidualReport, PolytopeError> {
    if pt.n() != sys.n {
        return Err(PolytopeError::PointSizeMismatch { point: pt.n(), system: sys.n });
    }
    let mut nonzero_residuals = Vec::new();
    for (idx, row) in sys.rows.iter().enumerate() {
        let mut lhs = Rational::zero();
        for (var_pos, coeff) in &row.coeffs {
            let value = pt.get(&sys.vars[*var_pos]);
            if !value.is_zero() {
                lhs += coeff * value;
            }
        }
        let residual = lhs - &row.rhs;
        if !residual.is_zero() {
            nonzero_residuals.push((idx, residual));
        }
    }
    let mut negative_values = Vec::new();
    let mut eliminated_nonzero = Vec::new();
    for (var, value) in pt.support() {
        if sys.is_eliminated(var) {
            eliminated_nonzero.push((*var, value.clone()));
        } else if value.is_negative() {
            negative_values.push((*var, value.clone()));
        }
    }
    let feasible = nonzero_residuals.is_empty()
        && negative_values.is_empty()
        && eliminated_nonzero.is_empty();
    let objective_value = sys.objective_value(pt);
    Ok(ResidualReport {
        row_count: sys.rows.len(),
        nonzero_residuals,
        negative_values,
        eliminated_nonzero,
        objective_value,
        feasible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    NativeJson,
    LpText,
}

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    n: usize,
    vars: Vec<String>,
    rows: Vec<RowDoc>,
    objective: Option<Vec<(usize, String)>>,
    eliminated: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RowDoc {
    coeffs: Vec<(usize, String)>,
    rhs: String,
}

/// Serializes the system. `native-json` is lossless over exact rationals;
/// `lp-text` is the conventional LP file layout and requires every
/// coefficient to have an exact decimal expansion.
pub fn export_lp(sys: &LinearSystem, format: ExportFormat) -> Result<String, PolytopeError> {
    match format {
        ExportFormat::NativeJson => {
            let doc = SystemDoc {
                n: sys.n,
                vars: sys.vars.iter().map(VarIndex::name).collect(),
                rows: sys
                    .rows
                    .iter()
                    .map(|row| RowDoc {
                        coeffs: row
                            .coeffs
                            .iter()
                            .map(|(idx, c)| (*idx, format_rational(c)))
                            .collect(),
                        rhs: format_rational(&row.rhs),
                    })
                    .collect(),
                objective: sys.objective.as_ref().map(|obj| {
                    obj.iter().map(|(idx, c)| (*idx, format_rational(c))).collect()
                }),
                eliminated: sys.eliminated.iter().map(VarIndex::name).collect(),
            };
            let mut text =
                serde_json::to_string_pretty(&doc).expect("system serialization cannot fail");
            text.push('\n');
            Ok(text)
        }
        ExportFormat::LpText => export_lp_text(sys),
    }
}

fn lp_term(name: &str, coeff: &Rational, first: bool) -> Result<String, PolytopeError> {
    let magnitude = coeff.abs();
    let sign = if coeff.is_negative() { "-" } else { "+" };
    let lead = if first {
        if coeff.is_negative() { "- ".to_string() } else { String::new() }
    } else {
        format!("{sign} ")
    };
    if magnitude.is_one() {
        return Ok(format!("{lead}{name}"));
    }
    let decimal = exact_decimal(&magnitude).ok_or_else(|| PolytopeError::InexactDecimal {
        var: name.to_string(),
        value: format_rational(coeff),
    })?;
    Ok(format!("{lead}{decimal} {name}"))
}

fn export_lp_text(sys: &LinearSystem) -> Result<String, PolytopeError> {
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    if let Some(obj) = &sys.objective {
        let mut first = true;
        for (idx, coeff) in obj {
            out.push(' ');
            out.push_str(&lp_term(&sys.vars[*idx].name(), coeff, first)?);
            first = false;
        }
    }
    out.push_str("\nSubject To\n");
    for (k, row) in sys.rows.iter().enumerate() {
        out.push_str(&format!(" c{}:", k + 1));
        let mut first = true;
        for (idx, coeff) in &row.coeffs {
            out.push(' ');
            out.push_str(&lp_term(&sys.vars[*idx].name(), coeff, first)?);
            first = false;
        }
        let rhs = exact_decimal(&row.rhs).ok_or_else(|| PolytopeError::InexactDecimal {
            var: format!("c{}", k + 1),
            value: format_rational(&row.rhs),
        })?;
        out.push_str(&format!(" = {rhs}\n"));
    }
    out.push_str("Bounds\n");
    for var in &sys.vars {
        out.push_str(&format!(" {} >= 0\n", var.name()));
    }
    out.push_str("End\n");
    Ok(out)
}

/// Parses a `native-json` export back into a system.
pub fn import_native_json(text: &str) -> Result<LinearSystem, PolytopeError> {
    let bad = |msg: String| PolytopeError::BadSystemFile(msg);
    let doc: SystemDoc = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if doc.n < MIN_VERTICES {
        return Err(bad("`n` below 2".to_string()));
    }
    let mut vars = Vec::with_capacity(doc.vars.len());
    for name in &doc.vars {
        let var = VarIndex::parse(name)?;
        if !var.in_range(doc.n) {
            return Err(bad(format!("variable `{name}` out of range")));
        }
        vars.push(var);
    }
    let count = vars.len();
    let parse_coeffs = |pairs: &[(usize, String)]| -> Result<Vec<(usize, Rational)>, PolytopeError> {
        pairs
            .iter()
            .map(|(idx, token)| {
                if *idx >= count {
                    return Err(PolytopeError::VarOutOfRange { index: *idx, count });
                }
                let c = parse_rational(token)
                    .map_err(|e| PolytopeError::BadSystemFile(e.to_string()))?;
                Ok((*idx, c))
            })
            .collect()
    };
    let mut rows = Vec::with_capacity(doc.rows.len());
    for row in &doc.rows {
        let coeffs = parse_coeffs(&row.coeffs)?;
        let rhs =
            parse_rational(&row.rhs).map_err(|e| PolytopeError::BadSystemFile(e.to_string()))?;
        rows.push((coeffs, rhs));
    }
    let objective = match &doc.objective {
        Some(obj) => Some(parse_coeffs(obj)?),
        None => None,
    };
    let mut sys = LinearSystem::from_parts(doc.n, vars, rows, objective)?;
    for name in &doc.eliminated {
        let var = VarIndex::parse(name)?;
        if !var.in_range(doc.n) {
            return Err(bad(format!("eliminated variable `{name}` out of range")));
        }
        sys.eliminated.insert(var);
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::{build_compat_matrix, zero_indices};
    use crate::graph::Digraph;
    use crate::rational::{rat, rat_int};

    fn three_cycle() -> Digraph {
        Digraph::parse("3\n0 1 0\n0 0 1\n1 0 0\n").unwrap()
    }

    fn cut_system(g: &Digraph) -> LinearSystem {
        let hull = build_hull_system(g.n()).unwrap();
        apply_cuts(&hull, &zero_indices(&build_compat_matrix(g))).unwrap()
    }

    #[test]
    fn canonical_identification_and_names() {
        let a = VarIndex::x(2, 0, 1, 2);
        let b = VarIndex::x(0, 2, 2, 1);
        assert_eq!(a, b);
        assert_eq!(a.name(), "x_1_3_3_2");
        assert_eq!(VarIndex::parse("x_3_1_2_3").unwrap(), a);
        assert_eq!(VarIndex::parse("y_2_1").unwrap(), VarIndex::y(1, 0));
        assert!(VarIndex::parse("x_1_1_2_3").is_err());
        assert!(VarIndex::parse("z_1").is_err());
        assert!(VarIndex::parse("x_0_1_2_3").is_err());
    }

    #[test]
    fn variable_and_row_counts() {
        let sys = build_hull_system(4).unwrap();
        assert_eq!(sys.var_count(), 72 + 16);
        assert_eq!(sys.row_count(), 48 + 48 + 4);
        let sys2 = build_hull_system(2).unwrap();
        assert_eq!(sys2.vars().iter().filter(|v| v.is_x()).count(), 2);
        assert_eq!(sys2.vars().iter().filter(|v| !v.is_x()).count(), 4);
        assert!(build_hull_system(1).is_err());
    }

    #[test]
    fn center_satisfies_hull_rows_exactly() {
        for n in 2..=7 {
            let sys = build_hull_system(n).unwrap();
            let report = evaluate_point(&sys, &center_point(n).unwrap()).unwrap();
            assert!(report.feasible, "center must satisfy every row at n = {n}");
        }
    }

    #[test]
    fn guess_points_satisfy_hull_rows_exactly() {
        for n in 2..=5 {
            let sys = build_hull_system(n).unwrap();
            for p in Permutation::all(n) {
                let report = evaluate_point(&sys, &guess_point(&p)).unwrap();
                assert!(report.feasible, "guess {p} must satisfy every row at n = {n}");
            }
        }
    }

    #[test]
    fn guess_point_support_shape() {
        let p = Permutation::identity(3).unwrap();
        let pt = guess_point(&p);
        assert_eq!(pt.support_len(), 3 + 3);
        assert_eq!(pt.get(&VarIndex::x(0, 1, 0, 1)), rat_int(1));
        assert_eq!(pt.get(&VarIndex::y(2, 2)), rat_int(1));
        assert_eq!(pt.get(&VarIndex::x(0, 1, 1, 0)), rat_int(0));
    }

    #[test]
    fn center_values() {
        let c3 = center_point(3).unwrap();
        assert_eq!(c3.get(&VarIndex::x(0, 1, 0, 1)), rat(1, 6));
        assert_eq!(c3.get(&VarIndex::y(0, 0)), rat(1, 3));
        let c2 = center_point(2).unwrap();
        assert_eq!(c2.get(&VarIndex::x(0, 1, 1, 0)), rat(1, 2));
        assert_eq!(c2.get(&VarIndex::y(1, 1)), rat(1, 2));
        assert!(center_point(1).is_err());
    }

    #[test]
    fn center_has_smaller_norm_than_any_guess() {
        for n in 3..=6 {
            let center_norm = center_point(n).unwrap().norm_sq();
            for p in Permutation::all(n) {
                assert!(center_norm < guess_point(&p).norm_sq());
            }
        }
    }

    #[test]
    fn cuts_on_complete_digraph_change_nothing() {
        let n = 4;
        let hull = build_hull_system(n).unwrap();
        let cut = cut_system(&Digraph::complete(n).unwrap());
        assert_eq!(hull, cut);
    }

    #[test]
    fn cuts_eliminate_exactly_the_zero_quadruples() {
        let g = three_cycle();
        let z = zero_indices(&build_compat_matrix(&g));
        let hull = build_hull_system(3).unwrap();
        let cut = apply_cuts(&hull, &z).unwrap();
        // 18 zero quadruples close under orientation swap into 9 variables.
        assert_eq!(hull.var_count() - cut.var_count(), 9);
        assert_eq!(cut.eliminated().count(), 9);
        for var in cut.eliminated() {
            assert!(hull.var_position(var).is_some());
            assert!(cut.var_position(var).is_none());
        }
    }

    #[test]
    fn guess_feasible_on_cut_system_iff_solution_grid() {
        let g = three_cycle();
        let c = build_compat_matrix(&g);
        let cut = cut_system(&g);
        for p in Permutation::all(3) {
            let grid = crate::compat::check_solution_grid(&p, &c).unwrap();
            let report = evaluate_point(&cut, &guess_point(&p)).unwrap();
            assert_eq!(report.feasible, grid, "guess feasibility must track the grid test");
            if !grid {
                assert!(!report.eliminated_nonzero.is_empty());
            }
        }
    }

    #[test]
    fn objective_examples() {
        // Unit weights on the fixed cycle: identity tour costs 3.
        let s3 = crate::graph::standard_cycle(3).unwrap();
        let sys = build_objective(
            &cut_system(&s3),
            &WeightMatrix::unit_for(&s3),
            ObjectiveReading::Restricted,
        )
        .unwrap();
        let identity = guess_point(&Permutation::identity(3).unwrap());
        assert_eq!(sys.objective_value(&identity).unwrap(), rat_int(3));

        // Directed 3-cycle, weights 1, 2, 3: all three rotations cost 6.
        let g = three_cycle();
        let mut w = WeightMatrix::unit_for(&g);
        w.set(1, 2, ExtRational::Finite(rat_int(2)));
        w.set(2, 0, ExtRational::Finite(rat_int(3)));
        let sys = build_objective(&cut_system(&g), &w, ObjectiveReading::Restricted).unwrap();
        for p in Permutation::all(3) {
            if crate::compat::check_solution_grid(&p, &build_compat_matrix(&g)).unwrap() {
                assert_eq!(sys.objective_value(&guess_point(&p)).unwrap(), rat_int(6));
            }
        }

        // Complete digraph n = 3 with the reference weight rows.
        let complete = Digraph::complete(3).unwrap();
        let w = WeightMatrix::parse("3\ninf 1 4\n2 inf 2\n3 5 inf\n").unwrap();
        let sys =
            build_objective(&cut_system(&complete), &w, ObjectiveReading::Restricted).unwrap();
        let best = Permutation::all(3)
            .iter()
            .map(|p| sys.objective_value(&guess_point(p)).unwrap())
            .min()
            .unwrap();
        assert_eq!(best, rat_int(6));
    }

    #[test]
    fn objective_of_guess_equals_tour_weight() {
        use crate::graph::permutation_to_cycle;
        let g = Digraph::complete(4).unwrap();
        let w = WeightMatrix::parse(
            "4\ninf 1 -2 3\n4 inf 5/2 -1\n2 7 inf 1\n-3 1/3 2 inf\n",
        )
        .unwrap();
        let sys = build_objective(&cut_system(&g), &w, ObjectiveReading::Restricted).unwrap();
        for p in Permutation::all(4) {
            let cycle = permutation_to_cycle(&p, &g).unwrap();
            let tour = cycle.tour_weight(&w);
            assert_eq!(
                ExtRational::Finite(sys.objective_value(&guess_point(&p)).unwrap()),
                tour
            );
        }
    }

    #[test]
    fn two_cycle_objective_counts_both_arcs() {
        let g = Digraph::parse("2\n0 1\n1 0\n").unwrap();
        let w = WeightMatrix::parse("2\ninf -1\n-2 inf\n").unwrap();
        let sys = build_objective(&cut_system(&g), &w, ObjectiveReading::Restricted).unwrap();
        for p in Permutation::all(2) {
            assert_eq!(sys.objective_value(&guess_point(&p)).unwrap(), rat_int(-3));
        }
    }

    #[test]
    fn literal_reading_is_constant_across_guesses() {
        let complete = Digraph::complete(3).unwrap();
        let w = WeightMatrix::parse("3\ninf 1 4\n2 inf 2\n3 5 inf\n").unwrap();
        let sys = build_objective(&cut_system(&complete), &w, ObjectiveReading::Literal).unwrap();
        let values: Vec<Rational> = Permutation::all(3)
            .iter()
            .map(|p| sys.objective_value(&guess_point(p)).unwrap())
            .collect();
        // Sum of all off-diagonal weights, independent of the guess.
        assert!(values.iter().all(|v| *v == rat_int(17)));
    }

    #[test]
    fn literal_reading_rejects_missing_arcs() {
        let g = three_cycle();
        let w = WeightMatrix::unit_for(&g);
        let err = build_objective(&cut_system(&g), &w, ObjectiveReading::Literal).unwrap_err();
        assert!(matches!(err, PolytopeError::InfiniteCoefficient { .. }));
    }

    #[test]
    fn perturbed_guess_reports_exactly_the_touching_rows() {
        let n = 3;
        let sys = build_hull_system(n).unwrap();
        let var = VarIndex::x(0, 1, 0, 1);
        let mut pt = guess_point(&Permutation::identity(n).unwrap());
        pt.set(var, pt.get(&var) + rat(1, 7));
        let report = evaluate_point(&sys, &pt).unwrap();
        assert!(!report.feasible);
        let touched: Vec<usize> = sys
            .rows()
            .iter()
            .enumerate()
            .filter(|(_, row)| {
                row.coeffs.iter().any(|(idx, _)| sys.vars()[*idx] == var)
            })
            .map(|(k, _)| k)
            .collect();
        let reported: Vec<usize> = report.nonzero_residuals.iter().map(|(k, _)| *k).collect();
        assert_eq!(reported, touched);
        for (_, residual) in &report.nonzero_residuals {
            assert_eq!(residual, &rat(1, 7));
        }
    }

    #[test]
    fn native_json_round_trip_is_lossless() {
        let g = three_cycle();
        let w = WeightMatrix::parse("3\ninf 1 inf\ninf inf 2\n3 inf inf\n").unwrap();
        let sys = build_objective(&cut_system(&g), &w, ObjectiveReading::Restricted).unwrap();
        let text = export_lp(&sys, ExportFormat::NativeJson).unwrap();
        let back = import_native_json(&text).unwrap();
        assert_eq!(sys, back);
        // cut variables are absent from the exported variable list
        for var in sys.eliminated() {
            assert!(!text.contains(&format!("\"{}\"", var.name())) || {
                // they may appear only inside the eliminated list
                let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
                doc["vars"].as_array().unwrap().iter().all(|v| v.as_str() != Some(&var.name()))
            });
        }
    }

    #[test]
    fn point_json_round_trip() {
        let pt = center_point(3).unwrap();
        let text = pt.to_json();
        let back = RationalPoint::from_json(&text).unwrap();
        assert_eq!(pt, back);
        assert!(RationalPoint::from_json("{}").is_err());
        assert!(RationalPoint::from_json("{\"n\":3,\"values\":{\"q_1\":\"1\"}}").is_err());
    }

    #[test]
    fn lp_text_for_tiny_system() {
        let sys = build_hull_system(2).unwrap();
        let text = export_lp(&sys, ExportFormat::LpText).unwrap();
        assert!(text.starts_with("Minimize\n obj:\nSubject To\n"));
        assert!(text.contains(" c1: x_1_2_2_1 - y_2_1 = 0\n"));
        assert!(text.trim_end().ends_with("End"));
        assert_eq!(text.matches(">= 0").count(), 6);
    }

    #[test]
    fn lp_text_rejects_inexact_decimals() {
        let vars = vec![VarIndex::x(0, 1, 0, 1)];
        let sys = LinearSystem::from_parts(
            2,
            vars,
            vec![(vec![(0, rat(1, 3))], rat_int(1))],
            None,
        )
        .unwrap();
        assert!(matches!(
            export_lp(&sys, ExportFormat::LpText),
            Err(PolytopeError::InexactDecimal { .. })
        ));
    }
}
