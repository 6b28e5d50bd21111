//! Analysis driver and report rendering.

use std::path::{Path, PathBuf};

use crate::algebra::{GaussRat, Poly, RatFun};
use crate::approx::{
    assemble_numeric, plan_cutoffs, psi_relation_check, symbolic_powers, NormalFormField, PsiVerdict, SampleBox,
    DEFAULT_GRID, DEFAULT_TRUNCATION,
};
use crate::autosys::{check_against, generate_system, grouped_unknowns, candidate_from_pairs};
use crate::bundle::{
    canonical_tprime_bundle, flatness_check, is_integrating_frame, is_solution_section, RatMatrix, SectionSym, VBundle,
};
use crate::cli::parse::{ApproxSpec, FbiSpec, StructureFile};
use crate::fbi::{
    direction_scan, geometric_radii, kappa_check, levi_to_normal_form, sign_condition, Classification, SampledData,
    ScanConfig, Window, DEFAULT_BOX, DEFAULT_DIRECTIONS, DEFAULT_INTERVALS, DEFAULT_KAPPA,
};
use crate::hull::{format_word, hull_chain, DEFAULT_K_MAX};
use crate::loci::{exceptional_locus_check, loci_report};
use crate::structure::{characteristic_dim, kernel_vectors, levi_form, theta_of_b, KernelMode, Provenance, StructureDef};
use crate::Error;

pub const REPORT_HEADER: &str = "involucalc-report v1";
pub const DEFAULT_RADII: (f64, f64, usize) = (1.0, 100.0, 12);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Analyze,
    Autosys,
    Approx,
    Wavefront,
}

/// Command-line settings; `None` falls back to the file, then to the defaults.
#[derive(Clone, Debug)]
pub struct Options {
    pub mode: Mode,
    pub k_max: usize,
    /// Covectors at 0 in the coordinate coframe; empty means `ds_1, …, ds_d`.
    pub covectors: Vec<Vec<GaussRat>>,
    pub order: Option<usize>,
    pub half_width: Option<f64>,
    pub grid: Option<usize>,
    pub kappa: Option<f64>,
    pub dirs: Option<usize>,
    pub radii: Option<(f64, f64, usize)>,
    pub csv_dir: Option<PathBuf>,
}

impl Options {
    pub fn new(mode: Mode) -> Self {
        Options {
            mode,
            k_max: DEFAULT_K_MAX,
            covectors: Vec::new(),
            order: None,
            half_width: None,
            grid: None,
            kappa: None,
            dirs: None,
            radii: None,
            csv_dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub entries: Vec<Entry>,
    /// `(module, message)` for every module that failed.
    pub errors: Vec<(String, String)>,
}

impl Report {
    fn push(&mut self, section: &str, key: impl Into<String>, value: impl ToString) {
        self.entries.push(Entry { section: section.into(), key: key.into(), value: value.to_string() });
    }

    fn fail(&mut self, module: &str, e: &Error) {
        self.push(module, "error", e);
        self.errors.push((module.into(), e.to_string()));
    }

    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries.iter().find(|e| e.section == section && e.key == key).map(|e| e.value.as_str())
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{REPORT_HEADER}\n");
        let mut current = "";
        for e in &self.entries {
            if e.section != current {
                out += &format!("\n[{}]\n", e.section);
                current = &e.section;
            }
            let mut lines = e.value.lines();
            out += &format!("{}: {}\n", e.key, lines.next().unwrap_or(""));
            for l in lines {
                out += &format!("    {l}\n");
            }
        }
        out
    }

    /// One `section<TAB>key<TAB>value` line per entry; tabs, newlines and backslashes are escaped.
    pub fn render_machine(&self) -> String {
        let esc = |s: &str| s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n");
        let mut out = format!("{REPORT_HEADER}\n");
        for e in &self.entries {
            out += &format!("{}\t{}\t{}\n", esc(&e.section), esc(&e.key), esc(&e.value));
        }
        out
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

struct Settings {
    order: usize,
    approx_box: f64,
    approx_grid: usize,
    kappa: f64,
    dirs: usize,
    radii: (f64, f64, usize),
    fbi_box: f64,
    fbi_grid: usize,
}

fn settings(file: &StructureFile, o: &Options) -> Settings {
    let a = file.approx.as_ref();
    let f = file.fbi.as_ref();
    Settings {
        order: o.order.or(a.and_then(|a| a.order)).unwrap_or(DEFAULT_TRUNCATION),
        approx_box: o.half_width.or(a.and_then(|a| a.half_width)).unwrap_or(1.0),
        approx_grid: o.grid.or(a.and_then(|a| a.grid)).unwrap_or(DEFAULT_GRID),
        kappa: o.kappa.or(f.and_then(|f| f.kappa)).unwrap_or(DEFAULT_KAPPA),
        dirs: o.dirs.or(f.and_then(|f| f.dirs)).unwrap_or(DEFAULT_DIRECTIONS),
        radii: o.radii.or(f.and_then(|f| f.radii)).unwrap_or(DEFAULT_RADII),
        fbi_box: f.and_then(|f| f.half_width).unwrap_or(DEFAULT_BOX),
        fbi_grid: f.and_then(|f| f.grid).unwrap_or(DEFAULT_INTERVALS),
    }
}

fn default_covectors(def: &StructureDef) -> Vec<Vec<GaussRat>> {
    (0..def.d())
        .map(|k| (0..def.n_coords()).map(|c| if c == def.s(k) { GaussRat::one() } else { GaussRat::zero() }).collect())
        .collect()
}

fn csv_path(o: &Options, name: &str) -> Option<PathBuf> {
    o.csv_dir.as_ref().map(|d| d.join(name))
}

/// Runs the analyses selected by `options.mode` and collects the results in order.
pub fn run_report(file: &StructureFile, options: &Options) -> Report {
    let mut r = Report::default();
    let s = settings(file, options);
    r.push("config", "k_max", options.k_max);
    r.push("config", "kappa", s.kappa);
    r.push("config", "grid", s.approx_grid);
    r.push("config", "s_min", ScanConfig::default().s_min);
    r.push("config", "order", s.order);
    r.push("config", "box", s.approx_box);
    r.push("config", "fbi_grid", s.fbi_grid);
    r.push("config", "fbi_box", s.fbi_box);
    r.push("config", "dirs", s.dirs);
    r.push("config", "radii", format!("{}:{}:{}", s.radii.0, s.radii.1, s.radii.2));
    let def = match file.structure() {
        Ok(d) => d,
        Err(e) => {
            r.fail("structure", &e);
            return r;
        }
    };
    r.push("structure", "dims", format!("nu={} d={} mu={}", def.nu(), def.d(), def.mu()));
    for (k, p) in def.phi().iter().enumerate() {
        r.push("structure", format!("phi{}", k + 1), p);
    }
    if let Some(dir) = &options.csv_dir {
        if let Err(e) = std::fs::create_dir_all(dir) {
            r.fail("csv", &Error::Io(format!("{}: {e}", dir.display())));
        }
    }
    match options.mode {
        Mode::Analyze => {
            structural(&mut r, file, &def, options);
            if !file.candidates.is_empty() {
                autosys_section(&mut r, file, &def, false);
            }
            bundle_section(&mut r, file, &def);
            if let Some(a) = &file.approx {
                approx_section(&mut r, a, &s, options);
            }
            if let Some(f) = &file.fbi {
                fbi_section(&mut r, f, &def, &s, options);
            }
        }
        Mode::Autosys => autosys_section(&mut r, file, &def, true),
        Mode::Approx => match &file.approx {
            Some(a) => approx_section(&mut r, a, &s, options),
            None => r.fail("approx", &Error::InvalidStructure("the file has no [approx] section".into())),
        },
        Mode::Wavefront => match &file.fbi {
            Some(f) => fbi_section(&mut r, f, &def, &s, options),
            None => r.fail("fbi", &Error::InvalidStructure("the file has no [fbi] section".into())),
        },
    }
    r
}

fn structural(r: &mut Report, file: &StructureFile, def: &StructureDef, o: &Options) {
    let origin = vec![GaussRat::zero(); def.n_coords()];
    r.push("characteristic", "characteristic_dim", characteristic_dim(def, &origin));
    if def.d() == 0 {
        r.push("levi", "skipped", "d = 0");
    } else {
        let covs = if o.covectors.is_empty() { default_covectors(def) } else { o.covectors.clone() };
        for (i, xi) in covs.iter().enumerate() {
            match levi_form(def, &origin, xi) {
                Ok(l) => {
                    r.push("levi", format!("covector{}", i + 1), join(xi));
                    r.push("levi", format!("inertia{}", i + 1), format!("({}, {}, {})", l.inertia.pos, l.inertia.neg, l.inertia.zero));
                    let rows: Vec<String> = l.matrix.entries().iter().map(|row| join(row)).collect();
                    r.push("levi", format!("matrix{}", i + 1), rows.join("; "));
                }
                Err(e) => r.fail("levi", &e),
            }
        }
    }
    let mode = if file.kernel.is_empty() { KernelMode::Auto } else { KernelMode::User(file.kernel.clone()) };
    let ks = match kernel_vectors(def, mode) {
        Ok(k) => k,
        Err(e) => {
            r.fail("kernel", &e);
            return;
        }
    };
    r.push("kernel", "generic_rank", ks.generic_rank);
    r.push("kernel", "count", ks.vectors.len());
    for (i, kv) in ks.vectors.iter().enumerate() {
        let prov = match &kv.provenance {
            Provenance::User => "user".to_string(),
            Provenance::Unit(l) => format!("unit e{}", l + 1),
            Provenance::Adjoint { delta, gamma, ell } => format!(
                "adjoint rows [{}] cols [{}] extra {}",
                join(&delta.iter().map(|x| x + 1).collect::<Vec<_>>()),
                join(&gamma.iter().map(|x| x + 1).collect::<Vec<_>>()),
                ell + 1
            ),
        };
        r.push("kernel", format!("b{}", i + 1), kv);
        r.push("kernel", format!("b{}_source", i + 1), prov);
        r.push("kernel", format!("theta{}", i + 1), theta_of_b(def, &kv.b));
    }
    if ks.vectors.is_empty() {
        r.push("hull", "skipped", "no kernel vectors");
        r.push("loci", "exceptional_locus", exceptional_locus_check(def));
        r.push("loci", "degeneracy_locus", "skipped");
        return;
    }
    let chain = match hull_chain(def, &ks.vectors, o.k_max) {
        Ok(c) => c,
        Err(e) => {
            r.fail("hull", &e);
            return;
        }
    };
    r.push("hull", "target_dim", chain.target_dim);
    for l in &chain.levels {
        let words: Vec<String> =
            l.new_generators.iter().map(|g| format!("{}·b{}", format_word(&g.word), g.seed + 1)).collect();
        r.push("hull", format!("k{}", l.level), format!("span_dim={} new=[{}]", l.span_dim_at_0, words.join(", ")));
    }
    r.push("hull", "nondeg_order", chain.nondeg_order.map(|k| k.to_string()).unwrap_or_else(|| "Undetermined".into()));
    r.push("hull", "stalls", join(&chain.stalls));
    let loci = loci_report(def, &ks.vectors, &chain);
    r.push("loci", "exceptional_locus", &loci.exceptional);
    r.push("loci", "degeneracy_locus", &loci.degeneracy);
}

fn autosys_section(r: &mut Report, file: &StructureFile, def: &StructureDef, print_system: bool) {
    let system = generate_system(def);
    if print_system {
        for (u, expr) in grouped_unknowns(def) {
            r.push("autosys", u, expr);
        }
        r.push("autosys", "complex_equations", system.complex_count);
        r.push("autosys", "real_equations", system.equations.len());
        r.push("autosys", "system", system.to_string().trim_end());
    }
    for c in &file.candidates {
        match candidate_from_pairs(def, &c.pairs) {
            Ok(x) => {
                let v = check_against(&system, &x);
                let text = match &v {
                    crate::autosys::Verdict::Automorphism => "Automorphism".to_string(),
                    crate::autosys::Verdict::Not { integral, field, part, residual } => format!(
                        "Not ({:?} L{}(d{}(X)) residual {})",
                        part,
                        field + 1,
                        system.integral_names[*integral],
                        residual
                    ),
                };
                r.push("candidates", c.name.clone(), text);
            }
            Err(e) => r.fail("candidates", &e),
        }
    }
}

fn bundle_section(r: &mut Report, file: &StructureFile, def: &StructureDef) {
    match canonical_tprime_bundle(def) {
        Ok(b) => {
            let zero = b.connection().iter().flatten().flatten().all(RatFun::is_zero);
            r.push("bundle", "tprime_connection_zero", zero);
            r.push("bundle", "tprime_flatness", flatness_check(&b));
        }
        Err(e) => r.fail("bundle", &e),
    }
    let Some(spec) = &file.bundle else { return };
    let base = def.frame().to_vec();
    let mut d: Vec<RatMatrix> = vec![vec![vec![RatFun::zero(def.vars()); spec.rank]; spec.rank]; base.len()];
    for (j, m) in &spec.connection {
        d[*j] = m.clone();
    }
    let labels = (1..=spec.rank).map(|a| format!("e{a}")).collect();
    let b = match VBundle::new(base, labels, d) {
        Ok(b) => b,
        Err(e) => {
            r.fail("bundle", &e);
            return;
        }
    };
    r.push("bundle", "user_rank", spec.rank);
    r.push("bundle", "user_flatness", flatness_check(&b));
    for (i, s) in spec.sections.iter().enumerate() {
        r.push("bundle", format!("section{}", i + 1), is_solution_section(&b, &SectionSym::new(s.clone())));
    }
    if let Some(l) = &spec.lambda {
        match is_integrating_frame(&b, l) {
            Ok(v) => r.push("bundle", "lambda", v),
            Err(e) => r.fail("bundle", &e),
        }
    }
}

fn approx_section(r: &mut Report, a: &ApproxSpec, s: &Settings, o: &Options) {
    let mut run = || -> Result<(), Error> {
        let f = NormalFormField::new(a.b.clone(), a.a.clone())?;
        let jet = symbolic_powers(&f, &a.u0, s.order)?;
        r.push("approx", "n", f.n());
        r.push("approx", "recursion_holds", jet.recursion_holds(&f));
        r.push("approx", "formal_identity_holds", jet.formal_identity_holds(&f));
        for j in 0..f.n() {
            let v = match psi_relation_check(&f, j, s.order) {
                PsiVerdict::Holds => format!("Holds for l <= {}", s.order),
                PsiVerdict::Fails { l, lhs, rhs } => format!("Fails at l={l}: {lhs} != {rhs}"),
            };
            r.push("approx", format!("psi_relation{}", j + 1), v);
        }
        let sample_box = SampleBox { half_widths: vec![s.approx_box; f.n() + 1], per_axis: s.approx_grid };
        r.push("approx", "effective_grid", sample_box.effective_per_axis());
        let plan = plan_cutoffs(&jet, sample_box)?;
        r.push("approx", "radii", join(&plan.radii()));
        let sol = assemble_numeric(&jet, &plan)?;
        let cert = sol.certificate();
        r.push("approx", "term_sups", join(&cert.term_sups.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()));
        r.push("approx", "tail_ok", cert.tail_ok);
        r.push("approx", "residual_slope", cert.slope.map(|x| format!("{x:.3}")).unwrap_or_else(|| "none (zero residual)".into()));
        let best = (0..=s.order).rev().find(|&k| cert.supports_order(k));
        r.push("approx", "supported_order", best.map(|k| k.to_string()).unwrap_or_else(|| "none".into()));
        if let Some(path) = csv_path(o, "approx.csv") {
            let pts = SampleBox { half_widths: vec![s.approx_box; f.n() + 1], per_axis: 5 }.points();
            sol.write_csv(&path, f.vars().names(), &pts, &sol.s_samples(4))?;
            r.push("approx", "csv", path.display());
        }
        Ok(())
    };
    if let Err(e) = run() {
        r.fail("approx", &e);
    }
}

fn fbi_section(r: &mut Report, spec: &FbiSpec, def: &StructureDef, s: &Settings, o: &Options) {
    let mut run = || -> Result<(), Error> {
        let (field, derived_xi0) = match &spec.b {
            Some(b) => (NormalFormField::new(vec![b.clone()], None)?, None),
            None => {
                let origin = vec![GaussRat::zero(); def.n_coords()];
                let tries: Vec<Vec<GaussRat>> = match o.covectors.first() {
                    Some(xi) => vec![xi.clone()],
                    None => default_covectors(def)
                        .into_iter()
                        .take(1)
                        .flat_map(|xi| {
                            let neg = xi.iter().map(|c| -c).collect();
                            [xi, neg]
                        })
                        .collect(),
                };
                let mut found = Err(Error::NoNegativeDirection);
                for xi in &tries {
                    found = levi_to_normal_form(def, &origin, xi).map(|nf| (xi.clone(), nf));
                    if !matches!(found, Err(Error::NoNegativeDirection)) {
                        break;
                    }
                }
                let (xi, nf) = found?;
                r.push("fbi", "covector", join(&xi));
                if nf.field.n() != 1 {
                    return Err(Error::DimensionMismatch(format!(
                        "wave-front scans sample (x1, t1) data; the normal form has {} x-variables",
                        nf.field.n()
                    )));
                }
                r.push("fbi", "witness", format!("L{} with Levi value {}", nf.witness_index + 1, nf.levi_value));
                (nf.field, nf.xi0.first().cloned())
            }
        };
        r.push("fbi", "b", &field.b()[0]);
        let xi0 = spec.covector.clone().or(derived_xi0).unwrap_or_else(GaussRat::one);
        let sign = sign_condition(&field, std::slice::from_ref(&xi0))?;
        r.push("fbi", "xi0", &xi0);
        r.push("fbi", "sign_value", &sign.value);
        r.push("fbi", "sign_condition", if sign.holds { "Holds" } else { "Fails" });
        if sign.holds {
            let kc = kappa_check(&field, std::slice::from_ref(&xi0), s.kappa, s.fbi_box, 0.1, DEFAULT_TRUNCATION)?;
            r.push("fbi", "kappa_check", format!("{} (lhs {:.4} vs rho/16 {:.4})", if kc.ok() { "ok" } else { "warning" }, kc.lhs, kc.rhs));
        }
        let window = Window::for_box(s.fbi_box);
        let range = (-s.fbi_box, s.fbi_box);
        let data = SampledData::from_ratfun(spec.u0.num(), spec.u0.den(), range, range, s.fbi_grid, Some(window))?;
        let radii = geometric_radii(s.radii.0, s.radii.1, s.radii.2);
        let scan = direction_scan(&data, s.kappa, (0.0, 0.0), s.dirs, &radii, ScanConfig::default())?;
        r.push("fbi", "u0", &spec.u0);
        for (d, (xi, tau)) in scan.directions.iter().enumerate() {
            r.push(
                "fbi",
                format!("dir{}", d),
                format!("({xi:.4}, {tau:.4}) slope {:.3} {}", scan.slopes[d], scan.classes[d]),
            );
        }
        let sgn = xi0.to_f64_pair().0.signum();
        let holds_dir = if sign.holds { sgn } else { -sgn };
        let good = scan.slopes[scan.nearest_direction(holds_dir, 0.0)];
        let bad = scan.slopes[scan.nearest_direction(-holds_dir, 0.0)];
        r.push("fbi", "sign_side_slope", format!("{good:.3}"));
        r.push("fbi", "opposite_side_slope", format!("{bad:.3}"));
        r.push("fbi", "slope_gap", format!("{:.3}", bad - good));
        let smooth = scan.classes.iter().filter(|c| **c == Classification::Smooth).count();
        r.push("fbi", "smooth_directions", format!("{smooth}/{}", scan.classes.len()));
        if let Some(path) = csv_path(o, "fbi_magnitudes.csv") {
            scan.write_csv(&path)?;
            r.push("fbi", "csv", path.display());
        }
        if let Some(path) = csv_path(o, "fbi_slopes.csv") {
            scan.write_slopes_csv(&path)?;
            r.push("fbi", "slopes_csv", path.display());
        }
        Ok(())
    };
    if let Err(e) = run() {
        r.fail("fbi", &e);
    }
}

/// Parses `"a, b, c"` into exact constants.
pub fn parse_covector(text: &str) -> Result<Vec<GaussRat>, Error> {
    let v = crate::algebra::VarSet::new::<&str>(&[]);
    text.split(',')
        .map(|p| {
            crate::cli::parse::parse_expr(p.trim(), &v)?
                .as_poly()
                .map(|q: Poly| q.constant_term())
                .ok_or_else(|| Error::ParseError { line: 1, col: 1, msg: format!("'{p}' is not a constant") })
        })
        .collect()
}

pub fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
