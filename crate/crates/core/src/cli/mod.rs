// SPDX-License-Identifier: Apache-2.0

//! The `soquet` command line.
//!
//! [`run`] parses arguments, executes one command and returns the process
//! exit code: 0 on success, 1 for user errors (bad arguments, missing or
//! malformed inputs, queries that fail to evaluate), 2 for internal errors.

pub mod report;
pub mod serve;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::facts::{export_facts, import_facts, EntityId, FactStore};
use crate::frontend::{extract_dir, FrontendError};
use crate::model::{load_model, save_model, ConcernModel, LeafStatus, NodeId};
use crate::query::{eval, overlay_roles, parse_query, Tuple, Value};
use crate::sorts::{instantiate, BindingsFile, SortKind, SortSpec};

pub use report::{render_structured, render_text};
pub use serve::{handle, serve, ApiResponse, ServeState};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

fn user(e: impl std::fmt::Display) -> CliError {
    CliError::User(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

type CliResult = Result<(), CliError>;

#[derive(Debug, Parser)]
#[command(name = "soquet", version, about = "Crosscutting-concern sort queries and concern models")]
struct Cli {
    /// Machine-readable (JSON) output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a source tree and write its facts file.
    Extract {
        source_root: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Project name; defaults to the source directory name.
        #[arg(long)]
        project: Option<String>,
    },
    /// Evaluate a query, given inline or as `@file`.
    Query {
        #[arg(long)]
        facts: PathBuf,
        query: String,
        /// Model whose virtual interfaces the query may refer to.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Instantiate a sort: `soquet sort cb --facts f --context .. --target ..`.
    Sort {
        kind: String,
        /// `--facts`, `--model`, `--parent`, `--name` and the sort's
        /// parameters as `--key value` or `key=value`.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Compose a pattern from a bindings file and attach it to a model.
    Pattern {
        /// Pattern name; must agree with the bindings file.
        name: String,
        #[arg(long)]
        bindings: PathBuf,
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Composite to attach under (path or node id); the root by default.
        #[arg(long, default_value = "")]
        parent: String,
        /// Name of the new composite; defaults to the pattern name.
        #[arg(long = "name")]
        node_name: Option<String>,
    },
    /// Create and edit concern models.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Render a whole model.
    Report {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        /// Facts file to check staleness against.
        #[arg(long)]
        facts: Option<PathBuf>,
    },
    /// Serve a model and its store over HTTP for the browser front end.
    Serve {
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 7878)]
        port: u16,
        /// Root of the extracted sources, for `/api/source`.
        #[arg(long)]
        sources: Option<PathBuf>,
        /// Persist refreshed leaves to the model file.
        #[arg(long)]
        write: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Structured,
}

#[derive(Debug, Subcommand)]
enum ModelCommand {
    /// Create an empty model file.
    New {
        path: PathBuf,
        #[arg(long)]
        name: String,
    },
    /// Add a composite.
    Add {
        path: PathBuf,
        #[arg(long, default_value = "")]
        parent: String,
        #[arg(long)]
        name: String,
    },
    /// Remove a node and its subtree.
    Remove { path: PathBuf, node: String },
    /// Move a node under another composite.
    Move {
        path: PathBuf,
        node: String,
        new_parent: String,
    },
    /// Define a virtual interface over members of a host type.
    Vi {
        path: PathBuf,
        #[arg(long)]
        facts: PathBuf,
        /// Host class or interface (id or qualified name).
        #[arg(long)]
        host: String,
        #[arg(long = "member", required = true)]
        members: Vec<String>,
        #[arg(long)]
        name: String,
    },
    /// Re-evaluate stale and broken leaves and write the model back.
    Refresh {
        path: PathBuf,
        #[arg(long)]
        facts: PathBuf,
        /// Re-evaluate every leaf.
        #[arg(long)]
        force: bool,
    },
    /// List leaves whose results touch an entity.
    Touching {
        path: PathBuf,
        entity: String,
        #[arg(long)]
        facts: Option<PathBuf>,
    },
    /// Print the tree.
    Show {
        path: PathBuf,
        #[arg(long)]
        facts: Option<PathBuf>,
    },
}

/// Runs one command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let mut ctx = Ctx { json: cli.json, out, err };
    match ctx.dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            e.exit_code()
        }
    }
}

struct Ctx<'a> {
    json: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

macro_rules! say {
    ($ctx:expr, $($arg:tt)*) => {
        writeln!($ctx.out, $($arg)*).map_err(internal)?
    };
}

macro_rules! warn {
    ($ctx:expr, $($arg:tt)*) => {
        writeln!($ctx.err, $($arg)*).map_err(internal)?
    };
}

impl Ctx<'_> {
    fn dispatch(&mut self, command: Command) -> CliResult {
        match command {
            Command::Extract {
                source_root,
                out,
                project,
            } => self.extract(&source_root, &out, project),
            Command::Query { facts, query, model } => self.query(&facts, &query, model.as_deref()),
            Command::Sort { kind, args } => self.sort(&kind, &args),
            Command::Pattern {
                name,
                bindings,
                facts,
                model,
                parent,
                node_name,
            } => self.pattern(&name, &bindings, &facts, &model, &parent, node_name),
            Command::Model(cmd) => self.model(cmd),
            Command::Report { model, format, facts } => self.report(&model, format, facts.as_deref()),
            Command::Serve {
                facts,
                model,
                port,
                sources,
                write,
            } => {
                let store = read_facts(&facts)?;
                let loaded = self.open_model(&model, Some(&store))?;
                let state = ServeState::new(store, loaded, Some(model), sources, write);
                warn!(self, "serving on http://127.0.0.1:{port}/api/model");
                serve(state, port).map_err(user)
            }
        }
    }

    fn extract(&mut self, root: &Path, out: &Path, project: Option<String>) -> CliResult {
        if !root.is_dir() {
            return Err(user(format!("{}: not a directory", root.display())));
        }
        let project = project.unwrap_or_else(|| {
            root.canonicalize()
                .ok()
                .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                .unwrap_or_else(|| "project".into())
        });
        let ex = extract_dir(root, &project).map_err(|e| match e {
            FrontendError::Facts(f) => internal(f),
            other => user(other),
        })?;
        for w in &ex.warnings {
            warn!(self, "warning: {w}");
        }
        let file = fs::File::create(out).map_err(|e| user(format!("{}: {e}", out.display())))?;
        export_facts(&ex.store, std::io::BufWriter::new(file)).map_err(internal)?;
        if self.json {
            let v = serde_json::json!({
                "store_hash": ex.store.hash(),
                "entities": entity_counts(&ex.store),
                "facts": ex.store.fact_counts().iter().map(|(k, n)| (format!("{k:?}"), *n)).collect::<BTreeMap<_, _>>(),
                "warnings": ex.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            });
            say!(self, "{}", pretty(&v));
        } else {
            say!(self, "store {}", ex.store.hash());
            for (k, n) in entity_counts(&ex.store) {
                say!(self, "  {k:<16} {n}");
            }
            for (k, n) in ex.store.fact_counts() {
                say!(self, "  {:<16} {n}", format!("{k:?}"));
            }
            say!(self, "{} warning(s)", ex.warnings.len());
        }
        Ok(())
    }

    fn query(&mut self, facts: &Path, text: &str, model: Option<&Path>) -> CliResult {
        let store = read_facts(facts)?;
        let text = match text.strip_prefix('@') {
            Some(path) => fs::read_to_string(path).map_err(|e| user(format!("{path}: {e}")))?,
            None => text.to_string(),
        };
        let query = parse_query(&text).map_err(user)?;
        let view = match model {
            Some(path) => {
                let m = self.open_model(path, Some(&store))?;
                overlay_roles(&store, &m.role_specs()).map_err(user)?
            }
            None => store,
        };
        let result = eval(&query, &view).map_err(user)?;
        match &result.value {
            Value::Tuples(t) => self.print_tuples(&t.tuples()),
            Value::Entities(e) => {
                if self.json {
                    say!(self, "{}", pretty(&serde_json::json!(e)));
                } else {
                    for id in e {
                        say!(self, "{id}");
                    }
                }
                Ok(())
            }
        }
    }

    fn print_tuples(&mut self, tuples: &[Tuple]) -> CliResult {
        if self.json {
            say!(self, "{}", pretty(&serde_json::json!(tuples)));
            return Ok(());
        }
        for t in tuples {
            let sites: Vec<String> = t.sites.iter().map(|s| s.to_string()).collect();
            say!(self, "{} -> {}  [{}]  {}", t.source, t.target, t.kind.name(), sites.join(", "));
        }
        Ok(())
    }

    fn sort(&mut self, kind: &str, args: &[String]) -> CliResult {
        let kind = SortKind::from_code(kind)
            .ok_or_else(|| user(format!("unknown sort `{kind}`; expected one of {}", sort_codes())))?;
        let mut opts = SortOpts::parse(kind, args)?;
        let facts = opts.facts.take().ok_or_else(|| user("sort: --facts is required"))?;
        let store = read_facts(&facts)?;
        let mut model = match &opts.model {
            Some(p) => Some(self.open_model(p, Some(&store))?),
            None => None,
        };
        let roles = model.as_ref().map(ConcernModel::role_specs).unwrap_or_default();
        let spec = SortSpec {
            kind,
            params: opts.params,
        };
        let name = opts.name.clone().unwrap_or_else(|| format!("{kind} {}", spec.params.values().cloned().collect::<Vec<_>>().join(", ")));
        let inst = instantiate(&store, &roles, &name, &spec).map_err(user)?;
        for w in &inst.warnings {
            warn!(self, "warning: {w}");
        }
        if self.json {
            say!(self, "{}", pretty(&serde_json::json!(inst)));
        } else {
            say!(self, "{}", inst.query_text.trim_end());
            say!(self, "-- {} tuple(s)", inst.result.len());
            self.print_tuples(&inst.result)?;
            if let Some(obl) = &inst.obligations {
                say!(self, "-- {} obligation(s)", obl.len());
                for o in obl {
                    say!(self, "{o}");
                }
            }
        }
        if let (Some(model), Some(path)) = (model.as_mut(), opts.model.as_ref()) {
            let parent = model.resolve_node(&opts.parent).map_err(user)?;
            let node = model.add_instance(parent, inst, &name).map_err(user)?;
            write_model(path, model)?;
            warn!(self, "added leaf {node} `{}`", model.path(node));
        }
        Ok(())
    }

    fn pattern(
        &mut self,
        name: &str,
        bindings: &Path,
        facts: &Path,
        model_path: &Path,
        parent: &str,
        node_name: Option<String>,
    ) -> CliResult {
        let text = fs::read_to_string(bindings).map_err(|e| user(format!("{}: {e}", bindings.display())))?;
        let file = BindingsFile::from_toml(&text).map_err(user)?;
        let row = crate::sorts::find_pattern(name).ok_or_else(|| user(format!("unknown pattern `{name}`")))?;
        if crate::sorts::find_pattern(&file.pattern).map(|r| r.name) != Some(row.name) {
            return Err(user(format!(
                "{} binds pattern `{}`, not `{name}`",
                bindings.display(),
                file.pattern
            )));
        }
        let store = read_facts(facts)?;
        let mut model = if model_path.exists() {
            self.open_model(model_path, Some(&store))?
        } else {
            let stem = model_path.file_stem().map(|s| s.to_string_lossy().into_owned());
            ConcernModel::new(&stem.unwrap_or_else(|| "model".into()))
        };
        let parent = model.resolve_node(parent).map_err(user)?;
        let group_name = node_name.unwrap_or_else(|| row.name.to_string());
        let group = model.add_bindings(&store, parent, &group_name, &file).map_err(user)?;
        write_model(model_path, &model)?;
        if self.json {
            let leaves: Vec<_> = model
                .children(group)
                .iter()
                .map(|c| serde_json::json!({"id": c, "path": model.path(*c)}))
                .collect();
            say!(self, "{}", pretty(&serde_json::json!({"composite": group, "leaves": leaves})));
        } else {
            say!(self, "{} ({} leaves)", model.path(group), model.children(group).len());
            for c in model.children(group) {
                let leaf = model.node(*c).and_then(|n| n.leaf()).expect("pattern children are leaves");
                say!(
                    self,
                    "  {}  [{}, {} tuple(s)]",
                    model.node(*c).expect("child").name,
                    leaf.instance.kind,
                    leaf.instance.result.len()
                );
            }
        }
        Ok(())
    }

    fn model(&mut self, cmd: ModelCommand) -> CliResult {
        match cmd {
            ModelCommand::New { path, name } => {
                if path.exists() {
                    return Err(user(format!("{} already exists", path.display())));
                }
                write_model(&path, &ConcernModel::new(&name))?;
                say!(self, "created {}", path.display());
            }
            ModelCommand::Add { path, parent, name } => {
                let mut m = self.open_model(&path, None)?;
                let p = m.resolve_node(&parent).map_err(user)?;
                let id = m.add_composite(p, &name).map_err(user)?;
                write_model(&path, &m)?;
                say!(self, "{id} {}", m.path(id));
            }
            ModelCommand::Remove { path, node } => {
                let mut m = self.open_model(&path, None)?;
                let id = m.resolve_node(&node).map_err(user)?;
                let shown = m.path(id);
                m.remove(id).map_err(user)?;
                write_model(&path, &m)?;
                say!(self, "removed {shown}");
            }
            ModelCommand::Move { path, node, new_parent } => {
                let mut m = self.open_model(&path, None)?;
                let id = m.resolve_node(&node).map_err(user)?;
                let p = m.resolve_node(&new_parent).map_err(user)?;
                m.move_node(id, p).map_err(user)?;
                write_model(&path, &m)?;
                say!(self, "{id} {}", m.path(id));
            }
            ModelCommand::Vi {
                path,
                facts,
                host,
                members,
                name,
            } => {
                let store = read_facts(&facts)?;
                let mut m = self.open_model(&path, Some(&store))?;
                let host = resolve_one(&store, &host)?;
                let vi = m.define_virtual_interface(&store, &host, members, &name).map_err(user)?.clone();
                for p in vi.partial_matches(&store).map_err(user)? {
                    warn!(
                        self,
                        "note: {} matches {} but lacks {}",
                        p.ty,
                        p.matched.join(", "),
                        p.missing.join(", ")
                    );
                }
                write_model(&path, &m)?;
                let sat = vi.satisfiers(&store).map_err(user)?;
                say!(self, "{} ({} satisfying type(s))", vi.id(), sat.len());
                for s in sat {
                    say!(self, "  {s}");
                }
            }
            ModelCommand::Refresh { path, facts, force } => {
                let store = read_facts(&facts)?;
                let mut m = self.open_model(&path, Some(&store))?;
                let report = m.refresh(&store, force);
                write_model(&path, &m)?;
                if self.json {
                    say!(self, "{}", pretty(&serde_json::json!(report)));
                } else if report.is_unchanged() {
                    say!(self, "no changes");
                } else {
                    for d in report.diffs.iter().filter(|d| !d.is_empty()) {
                        say!(self, "{}", d.path);
                        for t in &d.added {
                            say!(self, "  + {} -> {}", t.source, t.target);
                        }
                        for t in &d.removed {
                            say!(self, "  - {} -> {}", t.source, t.target);
                        }
                        for o in &d.obligations_added {
                            say!(self, "  + obligation {o}");
                        }
                        for o in &d.obligations_removed {
                            say!(self, "  - obligation {o}");
                        }
                    }
                    for e in &report.errors {
                        say!(self, "{}: broken: {}", e.path, e.message);
                    }
                }
                if !report.errors.is_empty() {
                    return Err(user(format!("{} leaf(s) failed to refresh", report.errors.len())));
                }
            }
            ModelCommand::Touching { path, entity, facts } => {
                let store = match &facts {
                    Some(f) => Some(read_facts(f)?),
                    None => None,
                };
                let m = self.open_model(&path, store.as_ref())?;
                let ids: Vec<EntityId> = match &store {
                    Some(s) => s.resolve(&entity),
                    None => touching_candidates(&entity),
                };
                let mut hits: Vec<NodeId> = ids.iter().flat_map(|e| m.touching(e)).collect();
                hits.sort_unstable();
                hits.dedup();
                let hits: Vec<NodeId> = m.leaves().into_iter().filter(|l| hits.contains(l)).collect();
                if self.json {
                    let v: Vec<_> = hits
                        .iter()
                        .map(|n| serde_json::json!({"id": n, "path": m.path(*n)}))
                        .collect();
                    say!(self, "{}", pretty(&serde_json::json!(v)));
                } else {
                    for n in hits {
                        say!(self, "{n} {}", m.path(n));
                    }
                }
            }
            ModelCommand::Show { path, facts } => {
                let store = match &facts {
                    Some(f) => Some(read_facts(f)?),
                    None => None,
                };
                let m = self.open_model(&path, store.as_ref())?;
                if self.json {
                    say!(self, "{}", pretty(&crate::model::document_with_status(&m)));
                } else {
                    let text = report::render_tree(&m);
                    write!(self.out, "{text}").map_err(internal)?;
                }
            }
        }
        Ok(())
    }

    fn report(&mut self, path: &Path, format: ReportFormat, facts: Option<&Path>) -> CliResult {
        let store = match facts {
            Some(f) => Some(read_facts(f)?),
            None => None,
        };
        let m = self.open_model(path, store.as_ref())?;
        let text = match format {
            ReportFormat::Text => render_text(&m),
            ReportFormat::Structured => render_structured(&m),
        };
        write!(self.out, "{text}").map_err(internal)?;
        Ok(())
    }

    /// Loads a model; with a store, warns first when they disagree.
    fn open_model(&mut self, path: &Path, store: Option<&FactStore>) -> Result<ConcernModel, CliError> {
        let text = fs::read_to_string(path).map_err(|e| user(format!("{}: {e}", path.display())))?;
        let (model, dangling) = load_model(&text, store).map_err(|e| user(format!("{}: {e}", path.display())))?;
        if let Some(store) = store {
            let stale = model
                .leaves()
                .into_iter()
                .filter(|l| matches!(model.status(*l), Some(LeafStatus::Stale)))
                .count();
            if (!model.store_hash.is_empty() && model.store_hash != store.hash()) || stale > 0 {
                warn!(
                    self,
                    "warning: model `{}` was computed against another fact store ({} stale leaf/leaves); run `soquet model refresh`",
                    model.name,
                    stale
                );
            }
            for (node, e) in dangling {
                warn!(self, "warning: {}: dangling reference {e}", model.path(node));
            }
        }
        Ok(model)
    }
}

fn sort_codes() -> String {
    SortKind::ALL.iter().map(|k| k.code().to_lowercase()).collect::<Vec<_>>().join(", ")
}

/// Options and parameters of `sort`, parsed by hand because the parameter
/// names depend on the sort.
struct SortOpts {
    facts: Option<PathBuf>,
    model: Option<PathBuf>,
    parent: String,
    name: Option<String>,
    params: BTreeMap<String, String>,
}

impl SortOpts {
    fn parse(kind: SortKind, args: &[String]) -> Result<SortOpts, CliError> {
        let mut opts = SortOpts {
            facts: None,
            model: None,
            parent: String::new(),
            name: None,
            params: BTreeMap::new(),
        };
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let (key, value) = if let Some(flag) = arg.strip_prefix("--") {
                match flag.split_once('=') {
                    Some((k, v)) => (k.to_string(), v.to_string()),
                    None => {
                        let v = it.next().ok_or_else(|| user(format!("sort: --{flag} needs a value")))?;
                        (flag.to_string(), v.clone())
                    }
                }
            } else if let Some((k, v)) = arg.split_once('=') {
                (k.to_string(), v.to_string())
            } else {
                return Err(user(format!("sort: unexpected argument `{arg}`")));
            };
            match key.as_str() {
                "facts" => opts.facts = Some(value.into()),
                "model" => opts.model = Some(value.into()),
                "parent" => opts.parent = value,
                "name" => opts.name = Some(value),
                _ => {
                    let key = canonical_param(kind, &key.replace('-', "_"));
                    if !kind.params().iter().any(|(p, _)| *p == key) {
                        let known: Vec<&str> = kind.params().iter().map(|(p, _)| *p).collect();
                        return Err(user(format!(
                            "sort {}: unknown parameter `{key}` (expected {})",
                            kind.code().to_lowercase(),
                            known.join(", ")
                        )));
                    }
                    opts.params.insert(key, value);
                }
            }
        }
        if let Some((missing, _)) = kind.params().iter().find(|(p, req)| *req && !opts.params.contains_key(*p)) {
            return Err(user(format!(
                "sort {}: missing parameter --{}",
                kind.code().to_lowercase(),
                missing.replace('_', "-")
            )));
        }
        if opts.name.is_some() && opts.model.is_none() {
            return Err(user("sort: --name needs --model"));
        }
        Ok(opts)
    }
}

/// Alternative parameter spellings accepted on the command line.
fn canonical_param(kind: SortKind, key: &str) -> String {
    match (kind, key) {
        (SortKind::ER | SortKind::RL, "field" | "method") => "reference".into(),
        _ => key.into(),
    }
}

fn read_facts(path: &Path) -> Result<FactStore, CliError> {
    let file = fs::File::open(path).map_err(|e| user(format!("{}: {e}", path.display())))?;
    import_facts(BufReader::new(file)).map_err(|e| user(format!("{}: {e}", path.display())))
}

fn write_model(path: &Path, model: &ConcernModel) -> CliResult {
    fs::write(path, save_model(model)).map_err(|e| user(format!("{}: {e}", path.display())))
}

fn resolve_one(store: &FactStore, text: &str) -> Result<EntityId, CliError> {
    let ids = store.resolve(text);
    match ids.len() {
        0 => Err(user(format!("`{text}` names no entity"))),
        1 => Ok(ids[0].clone()),
        _ => Err(user(format!(
            "`{text}` is ambiguous: {}",
            ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// Without a store, entity text is either a full id or a callable key.
fn touching_candidates(text: &str) -> Vec<EntityId> {
    if let Some(id) = EntityId::parse(text) {
        return vec![id];
    }
    use crate::facts::EntityKind;
    let kinds: &[EntityKind] = if text.contains('(') {
        &[EntityKind::Method, EntityKind::Constructor]
    } else {
        &[
            EntityKind::Class,
            EntityKind::Interface,
            EntityKind::Field,
            EntityKind::Package,
            EntityKind::VirtualInterface,
        ]
    };
    kinds
        .iter()
        .filter_map(|k| EntityId::parse(&format!("{}:{text}", k.tag())))
        .collect()
}

fn entity_counts(store: &FactStore) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for e in store.entities() {
        *counts.entry(format!("{:?}", e.kind)).or_insert(0) += 1;
    }
    counts
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}
