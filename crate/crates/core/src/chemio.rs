//! Molecular-integral ingestion: FCIDUMP parsing and writing, frozen-core
//! reduction to an active space, and bundled orbital metadata.

use std::fmt::Write as _;

use thiserror::Error;

use crate::symmetry::Irrep;

/// Conversion applied when reporting excitation energies.
pub const HARTREE_TO_EV: f64 = 27.211386245988;

#[derive(Debug, Error)]
pub enum ChemError {
    #[error("FCIDUMP parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("FCIDUMP index {index} out of range 1..={norb} at line {line}")]
    Bounds { line: usize, index: i64, norb: usize },
    #[error("MS2 = {0}: only closed-shell (MS2 = 0) references are supported")]
    UnsupportedReference(i64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown molecule `{0}` (known: furan, pyrrole, pyridine, pyrimidine)")]
    UnknownMolecule(String),
}

/// Mapping from FCIDUMP ORBSYM integers (1-based) to C2v irreps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbsymConvention {
    pub labels: [Irrep; 4],
}

impl Default for OrbsymConvention {
    /// Default integer convention: 1 -> A1, 2 -> A2, 3 -> B1, 4 -> B2.
    fn default() -> Self {
        OrbsymConvention {
            labels: [Irrep::A1, Irrep::A2, Irrep::B1, Irrep::B2],
        }
    }
}

impl OrbsymConvention {
    pub fn irrep(&self, orbsym: i64) -> Option<Irrep> {
        if (1..=4).contains(&orbsym) {
            Some(self.labels[(orbsym - 1) as usize])
        } else {
            None
        }
    }

    pub fn integer(&self, irrep: Irrep) -> usize {
        self.labels.iter().position(|&r| r == irrep).unwrap() + 1
    }
}

/// One- and two-electron integrals of an (active-space) Hamiltonian.
///
/// `h` is symmetric; `g` holds chemists'-notation integrals (pq|rs) with
/// the full 8-fold permutational symmetry populated. All energies in
/// Hartree.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularIntegrals {
    pub n_orbitals: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub core_energy: f64,
    h: Vec<f64>,
    g: Vec<f64>,
    pub orbital_irreps: Vec<Irrep>,
    pub point_group: String,
}

impl MolecularIntegrals {
    pub fn empty(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> Self {
        MolecularIntegrals {
            n_orbitals,
            n_alpha,
            n_beta,
            core_energy: 0.0,
            h: vec![0.0; n_orbitals * n_orbitals],
            g: vec![0.0; n_orbitals.pow(4)],
            orbital_irreps: vec![Irrep::A1; n_orbitals],
            point_group: "C2v".to_string(),
        }
    }

    pub fn n_electrons(&self) -> usize {
        self.n_alpha + self.n_beta
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.n_orbitals + q]
    }

    /// Chemists' notation (pq|rs).
    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orbitals;
        self.g[((p * n + q) * n + r) * n + s]
    }

    /// Sets h_pq and its symmetric image h_qp.
    pub fn set_h(&mut self, p: usize, q: usize, value: f64) {
        let n = self.n_orbitals;
        self.h[p * n + q] = value;
        self.h[q * n + p] = value;
    }

    /// Sets (pq|rs) and all eight permutational images.
    pub fn set_g(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        let n = self.n_orbitals;
        let mut put = |a: usize, b: usize, c: usize, d: usize| {
            self.g[((a * n + b) * n + c) * n + d] = value;
        };
        put(p, q, r, s);
        put(q, p, r, s);
        put(p, q, s, r);
        put(q, p, s, r);
        put(r, s, p, q);
        put(s, r, p, q);
        put(r, s, q, p);
        put(s, r, q, p);
    }

    pub fn validate(&self) -> Result<(), ChemError> {
        let n = self.n_orbitals;
        if self.orbital_irreps.len() != n {
            return Err(ChemError::Config(format!(
                "{} irrep labels for {} orbitals",
                self.orbital_irreps.len(),
                n
            )));
        }
        for p in 0..n {
            for q in 0..n {
                if (self.h(p, q) - self.h(q, p)).abs() > 1e-12 {
                    return Err(ChemError::Config(format!("h[{p},{q}] not symmetric")));
                }
            }
        }
        Ok(())
    }
}

/// Selection of active orbitals and electrons out of a larger problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSpaceSpec {
    pub active_orbital_indices: Vec<usize>,
    pub n_active_electrons: usize,
}

impl ActiveSpaceSpec {
    pub fn validate(&self, n_orbitals_full: usize) -> Result<(), ChemError> {
        let idx = &self.active_orbital_indices;
        if idx.is_empty() {
            return Err(ChemError::Config("active space has no orbitals".into()));
        }
        if !idx.windows(2).all(|w| w[0] < w[1]) {
            return Err(ChemError::Config(
                "active orbital indices must be strictly increasing and unique".into(),
            ));
        }
        if *idx.last().unwrap() >= n_orbitals_full {
            return Err(ChemError::Config(format!(
                "active orbital index {} out of range for {} orbitals",
                idx.last().unwrap(),
                n_orbitals_full
            )));
        }
        if self.n_active_electrons % 2 != 0 {
            return Err(ChemError::Config(
                "active electron count must be even (closed-shell reference)".into(),
            ));
        }
        if self.n_active_electrons > 2 * idx.len() {
            return Err(ChemError::Config(format!(
                "{} electrons do not fit in {} active orbitals",
                self.n_active_electrons,
                idx.len()
            )));
        }
        Ok(())
    }
}

/// Parse an FCIDUMP document with the default ORBSYM convention.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals, ChemError> {
    parse_fcidump_with(text, &OrbsymConvention::default())
}

pub fn parse_fcidump_with(
    text: &str,
    convention: &OrbsymConvention,
) -> Result<MolecularIntegrals, ChemError> {
    let mut lines = text.lines().enumerate();

    // Collect the namelist header up to &END or a bare slash.
    let mut header = String::new();
    let mut header_end_line = 0usize;
    let mut saw_terminator = false;
    for (i, line) in lines.by_ref() {
        let stripped = line.trim();
        header_end_line = i + 1;
        if let Some(pos) = stripped.find("&END").or_else(|| stripped.find("/")) {
            header.push(' ');
            header.push_str(&stripped[..pos]);
            saw_terminator = true;
            break;
        }
        header.push(' ');
        header.push_str(stripped);
    }
    if !saw_terminator {
        return Err(ChemError::Parse {
            line: header_end_line,
            message: "header namelist never terminated by &END or /".into(),
        });
    }
    let header = header.replace("&FCI", " ").replace(',', " ");
    let fields = parse_namelist(&header, header_end_line)?;

    let norb = require_int(&fields, "NORB", header_end_line)? as usize;
    let nelec = require_int(&fields, "NELEC", header_end_line)?;
    let ms2 = fields
        .iter()
        .find(|(k, _)| k == "MS2")
        .map(|(_, v)| parse_i64(&v[0], header_end_line))
        .transpose()?
        .unwrap_or(0);
    if ms2 != 0 {
        return Err(ChemError::UnsupportedReference(ms2));
    }
    if nelec < 0 || nelec % 2 != 0 {
        return Err(ChemError::Parse {
            line: header_end_line,
            message: format!("NELEC={nelec} is not an even electron count"),
        });
    }
    if norb == 0 {
        return Err(ChemError::Parse {
            line: header_end_line,
            message: "NORB must be positive".into(),
        });
    }

    let mut irreps = vec![Irrep::A1; norb];
    if let Some((_, values)) = fields.iter().find(|(k, _)| k == "ORBSYM") {
        if values.len() != norb {
            return Err(ChemError::Parse {
                line: header_end_line,
                message: format!("ORBSYM lists {} entries for NORB={}", values.len(), norb),
            });
        }
        for (p, v) in values.iter().enumerate() {
            let sym = parse_i64(v, header_end_line)?;
            irreps[p] = convention.irrep(sym).ok_or_else(|| ChemError::Parse {
                line: header_end_line,
                message: format!("ORBSYM value {sym} outside the C2v convention 1..=4"),
            })?;
        }
    }

    let n_each = (nelec / 2) as usize;
    let mut ints = MolecularIntegrals::empty(norb, n_each, n_each);
    ints.orbital_irreps = irreps;

    for (i, line) in lines {
        let line_no = i + 1;
        let stripped = line.trim();
        if stripped.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = stripped.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(ChemError::Parse {
                line: line_no,
                message: format!("expected `value i j k l`, found {} fields", tokens.len()),
            });
        }
        let value = parse_f64(tokens[0], line_no)?;
        let idx: Vec<i64> = tokens[1..]
            .iter()
            .map(|t| parse_i64(t, line_no))
            .collect::<Result<_, _>>()?;
        for &v in &idx {
            if v < 0 || v as usize > norb {
                return Err(ChemError::Bounds {
                    line: line_no,
                    index: v,
                    norb,
                });
            }
        }
        let (i1, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        match (i1 > 0, j > 0, k > 0, l > 0) {
            (true, true, true, true) => ints.set_g(
                i1 as usize - 1,
                j as usize - 1,
                k as usize - 1,
                l as usize - 1,
                value,
            ),
            (true, true, false, false) => ints.set_h(i1 as usize - 1, j as usize - 1, value),
            (false, false, false, false) => ints.core_energy = value,
            // single-index records (orbital energies) are accepted and ignored
            (true, false, false, false) => {}
            _ => {
                return Err(ChemError::Parse {
                    line: line_no,
                    message: format!("unsupported index pattern {i1} {j} {k} {l}"),
                })
            }
        }
    }

    Ok(ints)
}

fn parse_namelist(header: &str, line: usize) -> Result<Vec<(String, Vec<String>)>, ChemError> {
    let mut fields: Vec<(String, Vec<String>)> = Vec::new();
    for token in header.split_whitespace() {
        if let Some(eq) = token.find('=') {
            let key = token[..eq].to_ascii_uppercase();
            let rest = &token[eq + 1..];
            let mut values = Vec::new();
            if !rest.is_empty() {
                values.push(rest.to_string());
            }
            fields.push((key, values));
        } else if let Some(last) = fields.last_mut() {
            last.1.push(token.to_string());
        } else {
            return Err(ChemError::Parse {
                line,
                message: format!("stray header token `{token}` before any KEY="),
            });
        }
    }
    Ok(fields)
}

fn require_int(fields: &[(String, Vec<String>)], key: &str, line: usize) -> Result<i64, ChemError> {
    let (_, values) = fields
        .iter()
        .find(|(k, _)| k == key)
        .ok_or_else(|| ChemError::Parse {
            line,
            message: format!("missing required header field {key}"),
        })?;
    if values.is_empty() {
        return Err(ChemError::Parse {
            line,
            message: format!("header field {key} has no value"),
        });
    }
    parse_i64(&values[0], line)
}

fn parse_i64(token: &str, line: usize) -> Result<i64, ChemError> {
    token.trim().parse::<i64>().map_err(|_| ChemError::Parse {
        line,
        message: format!("`{token}` is not an integer"),
    })
}

fn parse_f64(token: &str, line: usize) -> Result<f64, ChemError> {
    let normalized = token.replace(['D', 'd'], "E");
    normalized.parse::<f64>().map_err(|_| ChemError::Parse {
        line,
        message: format!("`{token}` is not a real number"),
    })
}

/// Serialize integrals back to FCIDUMP text. Canonical representatives of
/// each 8-fold symmetry class are written with 17 significant digits, so
/// re-parsing reproduces the tensor exactly.
pub fn write_fcidump(ints: &MolecularIntegrals) -> String {
    write_fcidump_with(ints, &OrbsymConvention::default())
}

pub fn write_fcidump_with(ints: &MolecularIntegrals, convention: &OrbsymConvention) -> String {
    let n = ints.n_orbitals;
    let mut out = String::new();
    let _ = write!(out, "&FCI NORB={},NELEC={},MS2=0,", n, ints.n_electrons());
    let syms: Vec<String> = ints
        .orbital_irreps
        .iter()
        .map(|&r| convention.integer(r).to_string())
        .collect();
    let _ = write!(out, "\n ORBSYM={},", syms.join(","));
    out.push_str("\n ISYM=1,\n&END\n");

    let push_entry = |value: f64, i: usize, j: usize, k: usize, l: usize, out: &mut String| {
        let _ = writeln!(out, "{:>24.16E} {:>4} {:>4} {:>4} {:>4}", value, i, j, k, l);
    };

    for p in 0..n {
        for q in 0..=p {
            for r in 0..=p {
                let s_max = if r == p { q } else { r };
                for s in 0..=s_max {
                    let v = ints.g(p, q, r, s);
                    if v != 0.0 {
                        push_entry(v, p + 1, q + 1, r + 1, s + 1, &mut out);
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = ints.h(p, q);
            if v != 0.0 {
                push_entry(v, p + 1, q + 1, 0, 0, &mut out);
            }
        }
    }
    push_entry(ints.core_energy, 0, 0, 0, 0, &mut out);
    out
}

/// Frozen-core embedding: folds doubly occupied `frozen_occupied` orbitals
/// into effective one-electron integrals and the core energy, returning a
/// problem indexed over the active orbitals only.
///
/// h~_tu = h_tu + sum_i [2 (tu|ii) - (ti|iu)]
/// E_core += sum_i 2 h_ii + sum_ij [2 (ii|jj) - (ij|ji)]
pub fn freeze_core(
    full: &MolecularIntegrals,
    spec: &ActiveSpaceSpec,
    frozen_occupied: &[usize],
) -> Result<MolecularIntegrals, ChemError> {
    spec.validate(full.n_orbitals)?;
    for &f in frozen_occupied {
        if f >= full.n_orbitals {
            return Err(ChemError::Config(format!(
                "frozen orbital {f} out of range for {} orbitals",
                full.n_orbitals
            )));
        }
        if spec.active_orbital_indices.contains(&f) {
            return Err(ChemError::Config(format!(
                "orbital {f} appears in both the frozen and active sets"
            )));
        }
    }
    let expected_active = full
        .n_electrons()
        .checked_sub(2 * frozen_occupied.len())
        .ok_or_else(|| {
            ChemError::Config("more frozen orbitals than electron pairs".to_string())
        })?;
    if spec.n_active_electrons != expected_active {
        return Err(ChemError::Config(format!(
            "active electron count {} inconsistent with {} total electrons and {} frozen pairs",
            spec.n_active_electrons,
            full.n_electrons(),
            frozen_occupied.len()
        )));
    }

    let active = &spec.active_orbital_indices;
    let n_act = active.len();
    let n_each = spec.n_active_electrons / 2;
    let mut out = MolecularIntegrals::empty(n_act, n_each, n_each);
    out.point_group = full.point_group.clone();
    out.orbital_irreps = active.iter().map(|&p| full.orbital_irreps[p]).collect();

    let mut core = full.core_energy;
    for &i in frozen_occupied {
        core += 2.0 * full.h(i, i);
        for &j in frozen_occupied {
            core += 2.0 * full.g(i, i, j, j) - full.g(i, j, j, i);
        }
    }
    out.core_energy = core;

    for (t_new, &t) in active.iter().enumerate() {
        for (u_new, &u) in active.iter().enumerate() {
            if u_new > t_new {
                continue;
            }
            let mut h_eff = full.h(t, u);
            for &i in frozen_occupied {
                h_eff += 2.0 * full.g(t, u, i, i) - full.g(t, i, i, u);
            }
            out.set_h(t_new, u_new, h_eff);
        }
    }
    for (p_new, &p) in active.iter().enumerate() {
        for (q_new, &q) in active.iter().enumerate() {
            for (r_new, &r) in active.iter().enumerate() {
                for (s_new, &s) in active.iter().enumerate() {
                    let v = full.g(p, q, r, s);
                    if v != 0.0 {
                        out.set_g(p_new, q_new, r_new, s_new, v);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Per-orbital active-space metadata for one of the bundled molecules.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalRecord {
    pub index: usize,
    pub irrep: Irrep,
    pub occupancy: u8,
    pub character: String,
    pub energy_ev: f64,
}

const ORBITAL_METADATA: &str = include_str!("../data/orbital_metadata.tsv");

/// Bundled Hartree-Fock orbital metadata (index, irrep, occupancy,
/// character, energy in eV) for the four supported molecules.
pub fn orbital_metadata(molecule: &str) -> Result<Vec<OrbitalRecord>, ChemError> {
    let wanted = molecule.trim().to_ascii_lowercase();
    let mut records = Vec::new();
    for line in ORBITAL_METADATA.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            continue;
        }
        if fields[0] != wanted {
            continue;
        }
        records.push(OrbitalRecord {
            index: fields[1].parse().unwrap_or(0),
            irrep: Irrep::parse(fields[2]).map_err(|e| ChemError::Config(e.to_string()))?,
            occupancy: fields[3].parse().unwrap_or(0),
            character: fields[4].to_string(),
            energy_ev: fields[5].parse().unwrap_or(f64::NAN),
        });
    }
    if records.is_empty() {
        return Err(ChemError::UnknownMolecule(molecule.to_string()));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TWO_ORBITAL: &str = "\
&FCI NORB=2,NELEC=2,MS2=0,
 ORBSYM=1,3,
 ISYM=1,
&END
 0.6744  1 1 1 1
 0.6634  1 1 2 2
 0.6973  2 2 2 2
 0.1812  1 2 1 2
-1.2524  1 1 0 0
-0.4759  2 2 0 0
 0.7137  0 0 0 0
";

    #[test]
    fn parses_two_orbital_dump() {
        let ints = parse_fcidump(TWO_ORBITAL).unwrap();
        assert_eq!(ints.n_orbitals, 2);
        assert_eq!(ints.n_alpha, 1);
        assert_eq!(ints.orbital_irreps, vec![Irrep::A1, Irrep::B1]);
        assert_abs_diff_eq!(ints.core_energy, 0.7137, epsilon = 1e-12);
        // 8-fold images of (11|22)
        assert_abs_diff_eq!(ints.g(0, 0, 1, 1), 0.6634, epsilon = 1e-12);
        assert_abs_diff_eq!(ints.g(1, 1, 0, 0), 0.6634, epsilon = 1e-12);
        // (12|12) images
        assert_abs_diff_eq!(ints.g(0, 1, 0, 1), 0.1812, epsilon = 1e-12);
        assert_abs_diff_eq!(ints.g(1, 0, 0, 1), 0.1812, epsilon = 1e-12);
        assert_abs_diff_eq!(ints.g(1, 0, 1, 0), 0.1812, epsilon = 1e-12);
    }

    #[test]
    fn off_diagonal_h_is_mirrored() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,&END\n0.5 1 2 0 0\n";
        let ints = parse_fcidump(text).unwrap();
        assert_abs_diff_eq!(ints.h(0, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ints.h(1, 0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rejects_open_shell() {
        let text = "&FCI NORB=2,NELEC=3,MS2=1,&END\n0.0 0 0 0 0\n";
        assert!(matches!(
            parse_fcidump(text),
            Err(ChemError::UnsupportedReference(1))
        ));
    }

    #[test]
    fn names_offending_line() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,&END\n0.5 1 3 0 0\n";
        match parse_fcidump(text) {
            Err(ChemError::Bounds { line, index, norb }) => {
                assert_eq!(line, 2);
                assert_eq!(index, 3);
                assert_eq!(norb, 2);
            }
            other => panic!("expected bounds error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_header_is_reported() {
        let text = "&FCI NORB=two,NELEC=2,&END\n";
        assert!(matches!(parse_fcidump(text), Err(ChemError::Parse { line: 1, .. })));
    }

    #[test]
    fn fortran_exponents_parse() {
        let text = "&FCI NORB=1,NELEC=2,MS2=0,&END\n1.5D-1 1 1 0 0\n";
        let ints = parse_fcidump(text).unwrap();
        assert_abs_diff_eq!(ints.h(0, 0), 0.15, epsilon = 1e-15);
    }

    #[test]
    fn freeze_core_empty_set_is_identity() {
        let ints = parse_fcidump(TWO_ORBITAL).unwrap();
        let spec = ActiveSpaceSpec {
            active_orbital_indices: vec![0, 1],
            n_active_electrons: 2,
        };
        let out = freeze_core(&ints, &spec, &[]).unwrap();
        assert_eq!(out, ints);
    }

    #[test]
    fn freeze_core_with_zero_g_shifts_core_only() {
        let mut ints = MolecularIntegrals::empty(3, 2, 2);
        ints.set_h(0, 0, -2.0);
        ints.set_h(1, 1, -1.0);
        ints.set_h(2, 2, -0.5);
        ints.set_h(1, 2, 0.25);
        ints.core_energy = 1.5;
        let spec = ActiveSpaceSpec {
            active_orbital_indices: vec![1, 2],
            n_active_electrons: 2,
        };
        let out = freeze_core(&ints, &spec, &[0]).unwrap();
        assert_eq!(out.n_orbitals, 2);
        assert_abs_diff_eq!(out.core_energy, 1.5 + 2.0 * (-2.0), epsilon = 1e-14);
        assert_abs_diff_eq!(out.h(0, 0), -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.h(0, 1), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(out.h(1, 1), -0.5, epsilon = 1e-14);
    }

    #[test]
    fn freeze_core_rejects_overlap() {
        let ints = MolecularIntegrals::empty(3, 2, 2);
        let spec = ActiveSpaceSpec {
            active_orbital_indices: vec![0, 2],
            n_active_electrons: 2,
        };
        assert!(matches!(
            freeze_core(&ints, &spec, &[0]),
            Err(ChemError::Config(_))
        ));
    }

    #[test]
    fn metadata_matches_bundled_table() {
        let furan = orbital_metadata("furan").unwrap();
        assert!(furan.contains(&OrbitalRecord {
            index: 12,
            irrep: Irrep::B1,
            occupancy: 2,
            character: "pi".into(),
            energy_ev: -17.251,
        }));
        let pyrimidine = orbital_metadata("pyrimidine").unwrap();
        assert!(pyrimidine.contains(&OrbitalRecord {
            index: 20,
            irrep: Irrep::B2,
            occupancy: 2,
            character: "n".into(),
            energy_ev: -11.352,
        }));
        let pyridine = orbital_metadata("pyridine").unwrap();
        assert!(pyridine.contains(&OrbitalRecord {
            index: 51,
            irrep: Irrep::B1,
            occupancy: 0,
            character: "pi*".into(),
            energy_ev: 8.873,
        }));
        assert!(orbital_metadata("benzene").is_err());
    }
}
