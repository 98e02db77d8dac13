//! Fano threefold records, built-in toric fans and the derived tables and graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cy4;
use crate::error::{Error, Result};
use crate::mori::{BundleKind, DivisorialType};
use crate::superpot::{self, BaseReport, Target, Verdict};
use crate::toric::{Fan, ToricVariety};

/// The shipped transcription of the Fano tables.
pub const SHIPPED_CATALOG: &str = include_str!("../data/fano_catalog.json");

/// Picard-rank-one targets of the transition graph with their degrees `(−K)³`.
pub const SINKS: [(&str, i64); 5] = [("P3", 64), ("Q", 54), ("V3", 24), ("V4", 32), ("V5", 40)];

/// Toric symbol, catalog id of the matching row.
pub const TORIC_SYMBOLS: [(&str, &str); 18] = [
    ("F_1", "P3"),
    ("F_2", "2-34"),
    ("F_3", "2-35"),
    ("F_4", "2-36"),
    ("F_5", "2-33"),
    ("F_6", "3-27"),
    ("F_7", "3-31"),
    ("F_8", "3-25"),
    ("F_9", "3-28"),
    ("F_10", "3-30"),
    ("F_11", "3-29"),
    ("F_12", "3-26"),
    ("F_13", "4-10"),
    ("F_14", "4-11"),
    ("F_15", "4-9"),
    ("F_16", "4-12"),
    ("F_17", "5-3"),
    ("F_18", "5-2"),
];

fn normalize_symbol(symbol: &str) -> String {
    let s = symbol.trim();
    match s.strip_prefix("F_").or_else(|| s.strip_prefix('F')) {
        Some(n) => format!("F_{}", n.trim_start_matches('_')),
        None => s.to_string(),
    }
}

fn sub(f: Fan, cone: &[usize]) -> Fan {
    f.star_subdivide(cone).expect("built-in subdivision")
}

/// Fan of the toric Fano threefold with the given symbol (`F_1` is `P³`).
pub fn builtin_toric_fano(symbol: &str) -> Result<Fan> {
    let key = normalize_symbol(symbol);
    let p1 = Fan::projective_space(1);
    let p2 = Fan::projective_space(2);
    let p3 = Fan::projective_space(3);
    // P³ rays: 0 = e1, 1 = e2, 2 = e3, 3 = −e1−e2−e3
    let fan = match key.as_str() {
        "F_1" => p3,
        "F_2" => p1.product(&p2),
        "F_3" => sub(p3, &[0, 1, 2]),
        "F_4" => Fan::p1_bundle_over_surface(&p2, &[0, 0, 2]),
        "F_5" => sub(p3, &[0, 1]),
        "F_6" => p1.product(&p1).product(&p1),
        "F_7" => {
            let quadric = p1.product(&p1);
            Fan::p1_bundle_over_surface(&quadric, &[0, 1, 0, 1])
        }
        "F_8" => sub(sub(p3, &[0, 1]), &[2, 3]),
        "F_9" => Fan::hirzebruch(1).product(&p1),
        "F_10" => sub(sub(p3, &[0, 1, 2]), &[0, 1]),
        "F_11" => sub(sub(p3, &[0, 1, 2]), &[0, 4]),
        "F_12" => sub(sub(p3, &[0, 1]), &[0, 2, 3]),
        "F_13" => sub(sub(p2, &[0, 1]), &[1, 2]).product(&p1),
        // P¹×F₁ rays: 0..4 from F₁ (ray 1 the (−1)-curve), 4, 5 = ±e3
        "F_14" => sub(Fan::hirzebruch(1).product(&p1), &[1, 4]),
        "F_15" => sub(sub(sub(p3, &[0, 1]), &[2, 3]), &[4, 2]),
        "F_16" => sub(sub(sub(p3, &[0, 1]), &[4, 2]), &[4, 3]),
        "F_17" => sub(sub(sub(p2, &[0, 1]), &[1, 2]), &[0, 2]).product(&p1),
        "F_18" => sub(sub(sub(sub(p3, &[0, 1]), &[2, 3]), &[4, 2]), &[4, 3]),
        _ => {
            return Err(Error::UnknownSymbol {
                symbol: symbol.to_string(),
                known: TORIC_SYMBOLS.iter().map(|(s, _)| *s).collect::<Vec<_>>().join(", "),
            })
        }
    };
    Ok(fan.with_name(key))
}

/// Catalog id (or `P3`) carried by a toric symbol.
pub fn symbol_row(symbol: &str) -> Option<&'static str> {
    let key = normalize_symbol(symbol);
    TORIC_SYMBOLS.iter().find(|(s, _)| *s == key).map(|(_, id)| *id)
}

/// Catalog id of a built-in fan isomorphic to `fan`, if any.
pub fn identify_fan(fan: &Fan) -> Option<&'static str> {
    TORIC_SYMBOLS.iter().find_map(|(sym, id)| {
        let b = builtin_toric_fano(sym).ok()?;
        (b.rays.len() == fan.rays.len() && b.is_isomorphic(fan)).then_some(*id)
    })
}

/// `analyze_base` followed by identification of smooth contraction targets.
pub fn analyze_with_targets(v: &ToricVariety) -> Result<BaseReport> {
    let mut report = superpot::analyze_base(v)?;
    for d in &mut report.candidates {
        if let Some(Target::Smooth { fan, label }) = &mut d.target {
            *label = identify_fan(fan).map(str::to_string);
        }
    }
    Ok(report)
}

// -- records -------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalEntry {
    /// `2.9.1` … `2.9.5`.
    pub kind: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub count: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_genus: Option<i64>,
    /// `−K_{B_R} · L` for the blown-up curve `L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_degree: Option<i64>,
    pub contributes: bool,
}

fn one() -> u32 {
    1
}

fn is_one(x: &u32) -> bool {
    *x == 1
}

impl ExtremalEntry {
    pub fn div_type(&self) -> Option<DivisorialType> {
        let j = self.kind.strip_prefix("2.9.")?.parse::<u8>().ok()?;
        DivisorialType::from_index(j)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationEntry {
    /// `p` for a P¹-bundle, `c` for a conic bundle.
    pub kind: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoRecord {
    pub id: String,
    pub b2: u32,
    pub number: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suffix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toric_symbol: Option<String>,
    pub minus_k_cubed: i64,
    /// As printed; absent where the table leaves it blank.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_x: Option<i64>,
    pub very_ample: bool,
    pub extremal_data: Vec<ExtremalEntry>,
    pub fibrations: Vec<FibrationEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl FanoRecord {
    pub fn contributing_count(&self) -> u32 {
        self.extremal_data.iter().filter(|e| e.contributes).map(|e| e.count).sum()
    }

    /// `288 + 360 (−K)³`.
    pub fn formula_chi(&self) -> i64 {
        cy4::chi_x_from_degree(self.minus_k_cubed)
    }
}

/// Known misprints in the transcribed tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Erratum {
    pub row: &'static str,
    pub field: &'static str,
    /// The printed value, when the erratum is a single misprinted number.
    pub printed: Option<i64>,
    pub note: &'static str,
}

pub const ERRATA: [Erratum; 7] = [
    Erratum {
        row: "2-36",
        field: "contributing",
        printed: None,
        note: "the negative section is a P² with normal bundle O(−2), type 2.9.3, and has χ = 1 with vanishing higher cohomology",
    },
    Erratum {
        row: "3-12",
        field: "chi_x",
        printed: Some(110368),
        note: "extra leading digit; 288 + 360·28 = 10368",
    },
    Erratum {
        row: "3-6",
        field: "chi_x",
        printed: Some(8202),
        note: "288 + 360·22 = 8208; 8202 is not divisible by 72",
    },
    Erratum {
        row: "6-1",
        field: "chi_x",
        printed: Some(13248),
        note: "column shifted by one row; P¹×S_5 has degree 30 and χ = 11088",
    },
    Erratum {
        row: "7-1",
        field: "chi_x",
        printed: Some(15408),
        note: "column shifted by one row; P¹×S_4 has degree 24 and χ = 8928",
    },
    Erratum {
        row: "8-1",
        field: "chi_x",
        printed: Some(17568),
        note: "column shifted by one row; P¹×S_3 has degree 18 and χ = 6768",
    },
    Erratum {
        row: "3-28",
        field: "fibration_targets",
        printed: None,
        note: "P¹×F₁ fibres over F₁ and over P¹×P¹; the table prints P¹×P¹ twice",
    },
];

fn find_erratum(row: &str, field: &str, printed: Option<i64>) -> Option<&'static Erratum> {
    ERRATA
        .iter()
        .find(|e| e.row == row && e.field == field && (e.printed.is_none() || e.printed == printed))
}

/// Degree `(−K)³` of a named sink or catalog row.
pub fn target_degree(target: &str, records: &[FanoRecord]) -> Option<i64> {
    SINKS
        .iter()
        .find(|(n, _)| *n == target)
        .map(|(_, d)| *d)
        .or_else(|| records.iter().find(|r| r.id == target).map(|r| r.minus_k_cubed))
}

fn target_b2(target: &str, records: &[FanoRecord]) -> Option<u32> {
    if SINKS.iter().any(|(n, _)| *n == target) {
        return Some(1);
    }
    records.iter().find(|r| r.id == target).map(|r| r.b2)
}

/// Parses the catalog without semantic validation. Blank input is an empty catalog.
pub fn parse_records(text: &str) -> Result<Vec<FanoRecord>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(serde_json::from_str(text)?)
}

/// Reads and validates a catalog file.
pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<FanoRecord>> {
    let text = std::fs::read_to_string(path)?;
    let records = parse_records(&text)?;
    validate_records(&records)?;
    Ok(records)
}

/// The shipped catalog, validated.
pub fn shipped_records() -> Vec<FanoRecord> {
    let r = parse_records(SHIPPED_CATALOG).expect("shipped catalog parses");
    validate_records(&r).expect("shipped catalog is consistent");
    r
}

/// Internal invariants of each record; the first violation is returned.
pub fn validate_records(records: &[FanoRecord]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for r in records {
        let err = |message: String| Error::Catalog {
            row: r.id.clone(),
            message,
        };
        let expect_id = format!("{}-{}{}", r.b2, r.number, r.suffix.as_deref().unwrap_or(""));
        if r.id != expect_id {
            return Err(err(format!("id does not match b2/number/suffix ({expect_id})")));
        }
        if !seen.insert(r.id.clone()) {
            return Err(err("duplicate id".into()));
        }
        if let Some(chi) = r.chi_x {
            if chi != r.formula_chi() && find_erratum(&r.id, "chi_x", Some(chi)).is_none() {
                return Err(err(format!(
                    "chi_x = {chi} but 288 + 360·{} = {}",
                    r.minus_k_cubed,
                    r.formula_chi()
                )));
            }
        }
        if let Some(sym) = &r.toric_symbol {
            if symbol_row(sym) != Some(r.id.as_str()) {
                return Err(err(format!("toric symbol {sym} belongs to another row")));
            }
        }
        for e in &r.extremal_data {
            let Some(t) = e.div_type() else {
                return Err(err(format!("unknown contraction kind `{}`", e.kind)));
            };
            if e.count == 0 {
                return Err(err("zero multiplicity".into()));
            }
            if e.center_genus.is_some() && t != DivisorialType::ToCurve {
                return Err(err(format!("center genus given for type {}", e.kind)));
            }
            if let Some(g) = e.center_genus {
                if superpot::type_rule_predicts(t, Some(g)) != e.contributes {
                    return Err(err(format!("genus {g} contradicts the contribution flag")));
                }
            }
            if let Some(GenusCheck::Mismatch(m)) = genus_identity_check(r, e, records) {
                return Err(err(m));
            }
        }
        for f in &r.fibrations {
            if f.kind != "p" && f.kind != "c" {
                return Err(err(format!("fibration kind `{}`", f.kind)));
            }
        }
    }
    Ok(())
}

// -- genus identity --------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GenusCheck {
    Genus(i64),
    Mismatch(String),
}

/// Solves `(−K_B)³ = (−K_{B_R})³ − 2(−K_{B_R}·L − g + 1)` for `g`.
pub fn genus_from_identity(minus_k_b: i64, minus_k_target: i64, center_degree: i64) -> GenusCheck {
    let diff = minus_k_target - minus_k_b;
    if diff % 2 != 0 {
        return GenusCheck::Mismatch(format!(
            "({minus_k_target} − {minus_k_b})/2 is not an integer, so g is not integral"
        ));
    }
    let g = center_degree + 1 - diff / 2;
    if g < 0 {
        return GenusCheck::Mismatch(format!("identity gives negative genus {g}"));
    }
    GenusCheck::Genus(g)
}

/// Genus identity for a 2.9.1 entry with known target and center degree;
/// `None` when the entry lacks the data.
pub fn genus_identity_check(record: &FanoRecord, entry: &ExtremalEntry, records: &[FanoRecord]) -> Option<GenusCheck> {
    if entry.div_type() != Some(DivisorialType::ToCurve) {
        return None;
    }
    let deg = entry.center_degree?;
    let target = target_degree(entry.target.as_deref()?, records)?;
    Some(match genus_from_identity(record.minus_k_cubed, target, deg) {
        GenusCheck::Genus(g) => {
            let stored = entry.center_genus.unwrap_or(if entry.contributes { 0 } else { g });
            if stored != g {
                GenusCheck::Mismatch(format!("identity gives g = {g}, stored genus is {stored}"))
            } else if (g == 0) != entry.contributes {
                GenusCheck::Mismatch(format!("g = {g} but contributes = {}", entry.contributes))
            } else {
                GenusCheck::Genus(g)
            }
        }
        m => m,
    })
}

// -- del Pezzo surfaces ------------------------------------------------------------

/// `d·L − Σ a_i E_i` on `P²` blown up at `r` points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DelPezzoClass {
    pub d: i64,
    pub a: Vec<i64>,
}

impl DelPezzoClass {
    pub fn dot(&self, other: &DelPezzoClass) -> i64 {
        self.d * other.d - self.a.iter().zip(&other.a).map(|(x, y)| x * y).sum::<i64>()
    }

    pub fn self_intersection(&self) -> i64 {
        self.dot(self)
    }

    /// `K · e` with `K = −3L + Σ E_i`.
    pub fn k_degree(&self) -> i64 {
        -3 * self.d + self.a.iter().sum::<i64>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MinusOneCurves {
    Finite(Vec<DelPezzoClass>),
    /// `K² = 0`: infinitely many.
    Infinite,
}

impl MinusOneCurves {
    pub fn count(&self) -> Option<usize> {
        match self {
            MinusOneCurves::Finite(v) => Some(v.len()),
            MinusOneCurves::Infinite => None,
        }
    }
}

/// All classes with `e² = −1` and `K·e = −1` on `P²` blown up at `r ≤ 8` points.
pub fn minus_one_curves(r: usize) -> Result<MinusOneCurves> {
    if r == 9 {
        return Ok(MinusOneCurves::Infinite);
    }
    if r > 9 {
        return Err(Error::Validation(format!("r = {r} points: only 0 ≤ r ≤ 9 supported")));
    }
    let mut out = Vec::new();
    // Cauchy–Schwarz: (3d − 1)² ≤ r (d² + 1)
    for d in -8i64..=8 {
        let sum = 3 * d - 1;
        let sq = d * d + 1;
        if sum * sum > r as i64 * sq {
            continue;
        }
        let mut a = Vec::with_capacity(r);
        fill(r, sum, sq, &mut a, &mut |a| out.push(DelPezzoClass { d, a: a.to_vec() }));
    }
    out.sort();
    Ok(MinusOneCurves::Finite(out))
}

fn fill(k: usize, sum: i64, sq: i64, a: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
    if k == 0 {
        if sum == 0 && sq == 0 {
            emit(a);
        }
        return;
    }
    if sq < 0 || sum * sum > k as i64 * sq || (sum - sq) % 2 != 0 {
        return;
    }
    let bound = (sq as f64).sqrt() as i64 + 1;
    for x in -bound..=bound {
        if x * x > sq {
            continue;
        }
        a.push(x);
        fill(k - 1, sum - x, sq - x * x, a, emit);
        a.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DelPezzoBaseReport {
    pub k: u32,
    pub b2: u32,
    pub minus_k_cubed: i64,
    /// `None` marks infinitely many.
    pub contributing: Option<usize>,
    pub contribution_type: DivisorialType,
    pub divisor_surface: &'static str,
    pub fibration: String,
    pub very_ample: bool,
    pub chi_x: i64,
    pub h11_x: i64,
}

/// `B = P¹ × S_k`, `S_k` the blow-up of `P²` at `9 − k` points.
pub fn p1_times_delpezzo_report(k: u32) -> Result<DelPezzoBaseReport> {
    if k > 9 {
        return Err(Error::Validation(format!("k = {k}: need 0 ≤ k ≤ 9")));
    }
    let curves = minus_one_curves((9 - k) as usize)?;
    let b2 = 11 - k;
    let degree = 6 * k as i64;
    Ok(DelPezzoBaseReport {
        k,
        b2,
        minus_k_cubed: degree,
        contributing: curves.count(),
        contribution_type: DivisorialType::ToCurve,
        divisor_surface: "P1xP1",
        fibration: format!("p: B -> S{k}"),
        very_ample: k >= 3,
        chi_x: cy4::chi_x_from_degree(degree),
        h11_x: cy4::h11_x(b2 as i64),
    })
}

// -- transition graph ----------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphNode {
    pub id: String,
    pub b2: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
    pub div_type: String,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TransitionGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

impl TransitionGraph {
    pub fn out_degree(&self, id: &str) -> usize {
        self.edges.iter().filter(|e| e.from == id).count()
    }

    pub fn edges_from(&self, id: &str) -> Vec<&GraphEdge> {
        self.edges.iter().filter(|e| e.from == id).collect()
    }

    /// DOT rendering; one `rank=same` column per `b₂`, highest on the left.
    /// Point contractions are drawn thick.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph transitions {\n  rankdir=LR;\n  node [shape=box];\n");
        let mut by_b2: BTreeMap<u32, Vec<&GraphNode>> = BTreeMap::new();
        for n in &self.nodes {
            by_b2.entry(n.b2).or_default().push(n);
        }
        for (b2, nodes) in by_b2.iter().rev() {
            let _ = write!(s, "  subgraph b2_{b2} {{ rank=same;");
            for n in nodes {
                let _ = write!(s, " \"{}\";", n.id);
            }
            s.push_str(" }\n");
        }
        for e in &self.edges {
            let thick = matches!(e.div_type.as_str(), "2.9.2" | "2.9.4");
            let _ = write!(s, "  \"{}\" -> \"{}\" [type=\"{}\"", e.from, e.to, e.div_type);
            if e.multiplicity > 1 {
                let _ = write!(s, ", multiplicity={}, label=\"x{}\"", e.multiplicity, e.multiplicity);
            }
            if thick {
                s.push_str(", penwidth=3");
            }
            s.push_str("];\n");
        }
        s.push_str("}\n");
        s
    }
}

/// One node per record plus the five sinks; one edge per contributing
/// divisorial contraction with a named target.
pub fn transition_graph(records: &[FanoRecord]) -> Result<TransitionGraph> {
    if records.is_empty() {
        return Ok(TransitionGraph::default());
    }
    let mut nodes: Vec<GraphNode> = SINKS
        .iter()
        .map(|(n, _)| GraphNode { id: n.to_string(), b2: 1 })
        .collect();
    nodes.extend(records.iter().map(|r| GraphNode { id: r.id.clone(), b2: r.b2 }));
    let mut edges: BTreeMap<(String, String, String), u32> = BTreeMap::new();
    for r in records {
        for e in r.extremal_data.iter().filter(|e| e.contributes) {
            let Some(t) = &e.target else { continue };
            let Some(tb2) = target_b2(t, records) else {
                return Err(Error::Graph(format!("{} → {t}: unknown target", r.id)));
            };
            if tb2 + 1 != r.b2 {
                return Err(Error::Graph(format!(
                    "{} (b2 = {}) → {t} (b2 = {tb2}) does not drop b2 by one",
                    r.id, r.b2
                )));
            }
            *edges.entry((r.id.clone(), t.clone(), e.kind.clone())).or_default() += e.count;
        }
    }
    Ok(TransitionGraph {
        nodes,
        edges: edges
            .into_iter()
            .map(|((from, to, div_type), multiplicity)| GraphEdge {
                from,
                to,
                div_type,
                multiplicity,
            })
            .collect(),
    })
}

// -- table check -------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableDiff {
    pub row: String,
    pub field: String,
    pub table: String,
    pub computed: String,
    pub documented: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowResult {
    pub row: String,
    pub report: Option<BaseReport>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckReport {
    pub rows_checked: usize,
    pub toric_rows: usize,
    pub diffs: Vec<TableDiff>,
}

impl CheckReport {
    pub fn undocumented(&self) -> impl Iterator<Item = &TableDiff> {
        self.diffs.iter().filter(|d| !d.documented)
    }

    pub fn is_clean(&self) -> bool {
        self.undocumented().next().is_none()
    }
}

/// Engine dossier for a toric row.
pub fn engine_report(record: &FanoRecord) -> Result<Option<BaseReport>> {
    let Some(sym) = &record.toric_symbol else {
        return Ok(None);
    };
    let v = ToricVariety::new(builtin_toric_fano(sym)?)?;
    analyze_with_targets(&v).map(Some)
}

fn multiset<T: Ord>(items: impl IntoIterator<Item = T>) -> BTreeMap<T, usize> {
    let mut m = BTreeMap::new();
    for x in items {
        *m.entry(x).or_default() += 1;
    }
    m
}

fn fmt_multiset<T: std::fmt::Display>(m: &BTreeMap<T, usize>) -> String {
    if m.is_empty() {
        return "none".into();
    }
    m.iter()
        .map(|(k, n)| if *n == 1 { k.to_string() } else { format!("{k}x{n}") })
        .collect::<Vec<_>>()
        .join(", ")
}

fn diff(row: &str, field: &str, table: String, computed: String, printed: Option<i64>) -> TableDiff {
    let e = find_erratum(row, field, printed);
    TableDiff {
        row: row.to_string(),
        field: field.to_string(),
        table,
        computed,
        documented: e.is_some(),
        note: e.map(|e| e.note.to_string()),
    }
}

fn compare_toric(r: &FanoRecord, rep: &BaseReport, out: &mut Vec<TableDiff>) {
    let id = r.id.as_str();
    if rep.b2 as u32 != r.b2 {
        out.push(diff(id, "b2", r.b2.to_string(), rep.b2.to_string(), None));
    }
    if rep.minus_k_cubed != r.minus_k_cubed {
        out.push(diff(id, "minus_k_cubed", r.minus_k_cubed.to_string(), rep.minus_k_cubed.to_string(), None));
    }
    if rep.c1c2 != 24 {
        out.push(diff(id, "c1c2", "24".into(), rep.c1c2.to_string(), None));
    }
    if let Some(chi) = r.chi_x {
        if chi != rep.chi_x {
            out.push(diff(id, "chi_x", chi.to_string(), rep.chi_x.to_string(), Some(chi)));
        }
    }
    if rep.very_ample != r.very_ample {
        out.push(diff(id, "very_ample", r.very_ample.to_string(), rep.very_ample.to_string(), None));
    }

    let table_types = multiset(
        r.extremal_data
            .iter()
            .filter(|e| e.contributes)
            .flat_map(|e| std::iter::repeat_n(e.kind.clone(), e.count as usize)),
    );
    let engine: Vec<_> = rep.contributing().collect();
    let engine_types = multiset(engine.iter().filter_map(|d| d.div_type.map(|t| t.label().to_string())));
    if table_types != engine_types {
        out.push(diff(id, "contributing", fmt_multiset(&table_types), fmt_multiset(&engine_types), None));
    } else {
        let table_targets = multiset(
            r.extremal_data
                .iter()
                .filter(|e| e.contributes)
                .filter_map(|e| e.target.clone().map(|t| (t, e.count))),
        );
        let engine_targets = multiset(
            engine
                .iter()
                .filter_map(|d| d.target.as_ref().and_then(|t| t.label()).map(str::to_string)),
        );
        let mut missing = Vec::new();
        for ((t, count), n) in &table_targets {
            let need = *count as usize * n;
            if engine_targets.get(t).copied().unwrap_or(0) < need {
                missing.push(t.clone());
            }
        }
        if !missing.is_empty() {
            let table: BTreeMap<String, usize> =
                table_targets.iter().map(|((t, c), n)| (t.clone(), *c as usize * n)).collect();
            out.push(diff(id, "contraction_targets", fmt_multiset(&table), fmt_multiset(&engine_targets), None));
        }
    }

    let kind = |k: BundleKind| match k {
        BundleKind::P1Bundle => "p",
        BundleKind::ConicBundle => "c",
        BundleKind::Other => "other",
    };
    let table_fib = multiset(r.fibrations.iter().map(|f| f.kind.clone()));
    let engine_fib = multiset(rep.fibrations.iter().map(|f| kind(f.kind).to_string()));
    if table_fib != engine_fib {
        out.push(diff(id, "fibrations", fmt_multiset(&table_fib), fmt_multiset(&engine_fib), None));
    } else {
        let tt = multiset(r.fibrations.iter().map(|f| f.target.clone()));
        let et = multiset(rep.fibrations.iter().map(|f| f.target.clone()));
        if tt != et {
            out.push(diff(id, "fibration_targets", fmt_multiset(&tt), fmt_multiset(&et), None));
        }
    }
}

fn compare_record_internal(r: &FanoRecord, records: &[FanoRecord], out: &mut Vec<TableDiff>) {
    if let Some(chi) = r.chi_x {
        if chi != r.formula_chi() && r.toric_symbol.is_none() {
            out.push(diff(&r.id, "chi_x", chi.to_string(), r.formula_chi().to_string(), Some(chi)));
        }
    }
    for e in &r.extremal_data {
        if let Some(GenusCheck::Mismatch(m)) = genus_identity_check(r, e, records) {
            out.push(diff(&r.id, "genus_identity", e.target.clone().unwrap_or_default(), m, None));
        }
    }
}

/// Compares engine results on toric rows and internal identities on all rows.
/// Rows are processed in parallel; the diff order follows the record order.
pub fn check_tables(records: &[FanoRecord]) -> Result<CheckReport> {
    let per_row: Vec<Result<(bool, Vec<TableDiff>)>> = records
        .par_iter()
        .map(|r| {
            let mut out = Vec::new();
            compare_record_internal(r, records, &mut out);
            let rep = engine_report(r)?;
            if let Some(rep) = &rep {
                compare_toric(r, rep, &mut out);
            }
            Ok((rep.is_some(), out))
        })
        .collect();
    let mut report = CheckReport {
        rows_checked: records.len(),
        ..Default::default()
    };
    for r in per_row {
        let (toric, diffs) = r?;
        report.toric_rows += toric as usize;
        report.diffs.extend(diffs);
    }
    Ok(report)
}

fn contribution_cell(r: &FanoRecord) -> String {
    let parts: Vec<String> = r
        .extremal_data
        .iter()
        .filter(|e| e.contributes)
        .map(|e| {
            let j = e.div_type().map_or(0, |t| t.index());
            let mut s = format!("D{j}");
            if let Some(t) = &e.target {
                let _ = write!(s, "({t})");
            }
            if e.count > 1 {
                let _ = write!(s, "x{}", e.count);
            }
            s
        })
        .collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(", ")
    }
}

/// TSV mirroring the table columns, ordered by `b₂` descending then number.
pub fn tables_tsv(records: &[FanoRecord]) -> String {
    let mut rows: Vec<&FanoRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        (b.b2, a.number, a.suffix.as_deref()).cmp(&(a.b2, b.number, b.suffix.as_deref()))
    });
    let mut s = String::from("id\tb2\ttoric\tcontributing\tcount\tfibrations\tminus_k_cubed\tchi_x\tchi_printed\tell\tvery_ample\n");
    for r in rows {
        let fib = if r.fibrations.is_empty() {
            "none".to_string()
        } else {
            r.fibrations
                .iter()
                .map(|f| format!("{}: {}", f.kind, f.target))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let chi = r.formula_chi();
        let ell = if r.very_ample {
            cy4::ell_index(chi).map_or("-".into(), |l| l.to_string())
        } else {
            "-".into()
        };
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.id,
            r.b2,
            r.toric_symbol.as_deref().unwrap_or("no"),
            contribution_cell(r),
            r.contributing_count(),
            fib,
            r.minus_k_cubed,
            chi,
            r.chi_x.map_or("-".into(), |c| c.to_string()),
            ell,
            if r.very_ample { "yes" } else { "no" },
        );
    }
    s
}

/// TSV of a check report.
pub fn diffs_tsv(report: &CheckReport) -> String {
    let mut s = String::from("row\tfield\ttable\tcomputed\tstatus\tnote\n");
    for d in &report.diffs {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}",
            d.row,
            d.field,
            d.table,
            d.computed,
            if d.documented { "documented" } else { "UNDOCUMENTED" },
            d.note.as_deref().unwrap_or("")
        );
    }
    s
}

/// Count of contributing divisors the engine finds on a toric row.
pub fn engine_contributing(report: &BaseReport) -> usize {
    report.contributing().filter(|d| d.verdict == Verdict::Contributes).count()
}
