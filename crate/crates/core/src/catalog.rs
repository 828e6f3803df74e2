//! Field catalog loading and the on-disk prime-ideal table cache.
//!
//! Catalog lines are `label d class_number regulator nu`; a line holding
//! only a label, or a label followed by `Q`, names the rational field.
//! `#` starts a comment.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::numeric::norm_bound;
use crate::primeideals::{prime_ideals_up_to_bound, PrimeIdeal};

/// The catalog shipped with the crate.
pub const DEFAULT_CATALOG: &str = "\
# label  d   class_number  regulator              nu
Q
Qi       -1  1             1.0                    4
Qsqrt-3  -3  1             1.0                    6
Qsqrt2   2   1             0.881373587019543025   2
Qsqrt5   5   1             0.481211825059603447   2
";

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "IDEALSTAT_CACHE_DIR";

const CACHE_MAGIC: &str = "# idealstat prime-ideal table";
const CACHE_VERSION: u32 = 1;
const CACHE_COLUMNS: &str = "p,conjugate_index,norm,f,ramified";

#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    fields: Vec<FieldDescriptor>,
    /// `None` for the embedded default catalog.
    pub source: Option<PathBuf>,
    /// SHA-256 of the catalog text, hex encoded.
    pub checksum: String,
}

impl Catalog {
    pub fn default_catalog() -> Self {
        parse_catalog(DEFAULT_CATALOG, None).expect("embedded catalog is valid")
    }

    pub fn get(&self, label: &str) -> Result<&FieldDescriptor> {
        self.fields
            .iter()
            .find(|f| f.label == label)
            .ok_or_else(|| {
                Error::InvalidField(format!(
                    "unknown field `{label}` (catalog has {})",
                    self.labels().join(", ")
                ))
            })
    }

    pub fn labels(&self) -> Vec<&str> {
        self.fields.iter().map(|f| f.label.as_str()).collect()
    }

    pub fn fields(&self) -> &[FieldDescriptor] {
        &self.fields
    }
}

/// Load a catalog file, or the embedded default when `path` is `None`.
pub fn load_catalog(path: Option<&Path>) -> Result<Catalog> {
    match path {
        None => Ok(Catalog::default_catalog()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            parse_catalog(&text, Some(p.to_path_buf()))
        }
    }
}

pub fn parse_catalog(text: &str, source: Option<PathBuf>) -> Result<Catalog> {
    let mut fields: Vec<FieldDescriptor> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let label = tokens[0];
        if label.contains(['/', '\\']) || label == "." || label == ".." {
            return Err(parse_err(format!("label `{label}` is not a valid name")));
        }
        let desc = match tokens.len() {
            1 => FieldDescriptor::rationals_labelled(label),
            2 if tokens[1] == "Q" => FieldDescriptor::rationals_labelled(label),
            5 => {
                let d: i64 = tokens[1]
                    .parse()
                    .map_err(|_| parse_err(format!("bad d `{}`", tokens[1])))?;
                let h: u64 = tokens[2]
                    .parse()
                    .map_err(|_| parse_err(format!("bad class number `{}`", tokens[2])))?;
                let r: f64 = tokens[3]
                    .parse()
                    .map_err(|_| parse_err(format!("bad regulator `{}`", tokens[3])))?;
                let nu: u32 = tokens[4]
                    .parse()
                    .map_err(|_| parse_err(format!("bad nu `{}`", tokens[4])))?;
                FieldDescriptor::quadratic(label, d, h, r, nu).map_err(|e| match e {
                    Error::InvalidField(message) => Error::Validation {
                        field: label.to_string(),
                        message,
                    },
                    other => other,
                })?
            }
            n => {
                return Err(parse_err(format!(
                    "expected `label d class_number regulator nu` or `label Q`, got {n} fields"
                )))
            }
        };
        if fields.iter().any(|f| f.label == desc.label) {
            return Err(Error::Validation {
                field: desc.label,
                message: "duplicate label".into(),
            });
        }
        fields.push(desc);
    }
    Ok(Catalog {
        fields,
        source,
        checksum: hex::encode(Sha256::digest(text.as_bytes())),
    })
}

/// Cache directory: the environment override, else `.idealstat-cache` in the working directory.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".idealstat-cache"))
}

/// How a prime table was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOrigin {
    /// No usable file existed; the table was built and written.
    Built,
    /// An exact-bound file was read.
    Hit,
    /// A file with a larger bound was read and truncated.
    Prefix,
    /// A file failed validation and was replaced.
    Rebuilt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimeTable {
    pub label: String,
    pub bound: u64,
    pub ideals: Vec<PrimeIdeal>,
    pub origin: CacheOrigin,
    pub path: PathBuf,
    /// Problems met while reading the cache (for example a checksum mismatch).
    pub warnings: Vec<String>,
}

fn field_tag(desc: &FieldDescriptor) -> String {
    match desc.d {
        None => "Q".to_string(),
        Some(d) => format!("d={d}"),
    }
}

fn table_body(ideals: &[PrimeIdeal]) -> String {
    let mut body = String::with_capacity(ideals.len() * 16);
    for q in ideals {
        body.push_str(&format!(
            "{},{},{},{},{}\n",
            q.p,
            q.conjugate_index,
            q.norm,
            q.f,
            u8::from(q.ramified)
        ));
    }
    body
}

fn render_table(desc: &FieldDescriptor, bound: u64, ideals: &[PrimeIdeal]) -> String {
    let body = table_body(ideals);
    let checksum = hex::encode(Sha256::digest(body.as_bytes()));
    format!(
        "{CACHE_MAGIC} v{CACHE_VERSION}\nlabel {}\nfield {}\nbound {bound}\nsha256 {checksum}\n{CACHE_COLUMNS}\n{body}",
        desc.label,
        field_tag(desc)
    )
}

/// Parse and validate a cache file, returning its bound and ideals.
fn read_table(
    path: &Path,
    desc: &FieldDescriptor,
) -> std::result::Result<(u64, Vec<PrimeIdeal>), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("unreadable: {e}"))?;
    let mut lines = text.splitn(7, '\n');
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| format!("truncated before {what}"))
    };
    if next("magic")? != format!("{CACHE_MAGIC} v{CACHE_VERSION}") {
        return Err("wrong magic or version".into());
    }
    let label = next("label")?;
    if label.strip_prefix("label ") != Some(desc.label.as_str()) {
        return Err(format!("label mismatch: {label}"));
    }
    let field = next("field")?;
    if field.strip_prefix("field ") != Some(field_tag(desc).as_str()) {
        return Err(format!("field mismatch: {field}"));
    }
    let bound: u64 = next("bound")?
        .strip_prefix("bound ")
        .and_then(|b| b.parse().ok())
        .ok_or("bad bound line")?;
    let checksum = next("checksum")?
        .strip_prefix("sha256 ")
        .ok_or("bad checksum line")?
        .to_string();
    if next("columns")? != CACHE_COLUMNS {
        return Err("bad column header".into());
    }
    let body = next("rows")?;
    if hex::encode(Sha256::digest(body.as_bytes())) != checksum {
        return Err("checksum mismatch".into());
    }
    let mut ideals = Vec::new();
    for row in body.lines() {
        let cols: Vec<u64> = row
            .split(',')
            .map(|c| c.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| format!("bad row `{row}`"))?;
        if cols.len() != 5 {
            return Err(format!("bad row `{row}`"));
        }
        ideals.push(PrimeIdeal {
            p: cols[0],
            conjugate_index: cols[1] as u8,
            norm: cols[2],
            f: cols[3] as u8,
            ramified: cols[4] == 1,
        });
    }
    Ok((bound, ideals))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    let tmp = dir.join(format!(
        ".{}.{}.{nanos}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("table"),
        std::process::id()
    ));
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(contents.as_bytes())
        .and_then(|_| file.sync_all())
        .map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Path of the cache file for a field and integer bound.
pub fn cache_path(cache_dir: &Path, desc: &FieldDescriptor, bound: u64) -> PathBuf {
    cache_dir
        .join(&desc.label)
        .join(format!("{bound}.primetab"))
}

/// Prime ideals of norm at most `x`, from the cache when a valid table covers `x`.
pub fn cache_get_or_build(desc: &FieldDescriptor, x: f64, cache_dir: &Path) -> Result<PrimeTable> {
    let bound = norm_bound(x);
    let path = cache_path(cache_dir, desc, bound);
    let mut warnings = Vec::new();
    let mut exact_was_bad = false;

    if path.exists() {
        match read_table(&path, desc) {
            Ok((b, ideals)) if b == bound => {
                return Ok(PrimeTable {
                    label: desc.label.clone(),
                    bound,
                    ideals,
                    origin: CacheOrigin::Hit,
                    path,
                    warnings,
                })
            }
            Ok(_) => {
                exact_was_bad = true;
                warnings.push(format!(
                    "{}: bound does not match file name",
                    path.display()
                ));
            }
            Err(why) => {
                exact_was_bad = true;
                warnings.push(format!("{}: {why}; rebuilding", path.display()));
            }
        }
    }

    // A table for a larger bound contains ours as a prefix.
    if let Some((larger, larger_path)) = larger_tables(cache_dir, desc, bound).into_iter().next() {
        match read_table(&larger_path, desc) {
            Ok((b, mut ideals)) if b == larger => {
                let keep = ideals.partition_point(|q| q.norm <= bound);
                ideals.truncate(keep);
                if !exact_was_bad {
                    return Ok(PrimeTable {
                        label: desc.label.clone(),
                        bound,
                        ideals,
                        origin: CacheOrigin::Prefix,
                        path: larger_path,
                        warnings,
                    });
                }
            }
            Ok(_) => warnings.push(format!("{}: bound mismatch", larger_path.display())),
            Err(why) => warnings.push(format!("{}: {why}", larger_path.display())),
        }
    }

    let ideals = prime_ideals_up_to_bound(desc, bound);
    write_atomic(&path, &render_table(desc, bound, &ideals))?;
    Ok(PrimeTable {
        label: desc.label.clone(),
        bound,
        ideals,
        origin: if exact_was_bad {
            CacheOrigin::Rebuilt
        } else {
            CacheOrigin::Built
        },
        path,
        warnings,
    })
}

/// Cached tables with bound above `bound`, smallest first.
fn larger_tables(cache_dir: &Path, desc: &FieldDescriptor, bound: u64) -> Vec<(u64, PathBuf)> {
    let Ok(entries) = fs::read_dir(cache_dir.join(&desc.label)) else {
        return Vec::new();
    };
    let mut found: Vec<(u64, PathBuf)> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let path = e.path();
            let stem = path.file_name()?.to_str()?.strip_suffix(".primetab")?;
            let b: u64 = stem.parse().ok()?;
            (b > bound).then_some((b, path))
        })
        .collect();
    found.sort();
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primeideals::prime_ideals_up_to;

    #[test]
    fn default_catalog_labels() {
        let c = Catalog::default_catalog();
        assert_eq!(c.labels(), vec!["Q", "Qi", "Qsqrt-3", "Qsqrt2", "Qsqrt5"]);
        assert_eq!(c.get("Qi").unwrap().discriminant, -4);
        assert!(c.get("Q").unwrap().is_rational());
        assert!(matches!(c.get("nope"), Err(Error::InvalidField(_))));
    }

    #[test]
    fn parse_single_line() {
        let c = parse_catalog("Qi -1 1 1.0 4\n", None).unwrap();
        assert_eq!(c.get("Qi").unwrap().discriminant, -4);
        let c = parse_catalog("Rat Q  # the rationals\n", None).unwrap();
        assert!(c.get("Rat").unwrap().is_rational());
    }

    #[test]
    fn rejects_bad_lines() {
        let err = parse_catalog("# header\nQ4 4 1 1.0 2\n", None).unwrap_err();
        assert!(
            matches!(err, Error::Validation { ref field, .. } if field == "Q4"),
            "{err}"
        );
        let err = parse_catalog("Q\nQi -1 one 1.0 4\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_catalog("Qi -1 1 1.0\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_catalog("Q\nQ\n", None).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
        let err = parse_catalog("Qbad -1 1 1.0 6\n", None).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }

    #[test]
    fn loading_twice_is_equal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fields.txt");
        fs::write(&path, DEFAULT_CATALOG).unwrap();
        let a = load_catalog(Some(&path)).unwrap();
        let b = load_catalog(Some(&path)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fields(), Catalog::default_catalog().fields());
        assert!(matches!(
            load_catalog(Some(&dir.path().join("missing"))),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn cache_build_hit_prefix_and_tamper() {
        let dir = tempfile::tempdir().unwrap();
        let k = Catalog::default_catalog().get("Qi").unwrap().clone();
        let first = cache_get_or_build(&k, 1e4, dir.path()).unwrap();
        assert_eq!(first.origin, CacheOrigin::Built);
        assert_eq!(first.ideals, prime_ideals_up_to(&k, 1e4));
        let bytes = fs::read(&first.path).unwrap();

        let second = cache_get_or_build(&k, 1e4, dir.path()).unwrap();
        assert_eq!(second.origin, CacheOrigin::Hit);
        assert_eq!(second.ideals, first.ideals);

        let prefix = cache_get_or_build(&k, 1e3, dir.path()).unwrap();
        assert_eq!(prefix.origin, CacheOrigin::Prefix);
        assert_eq!(prefix.ideals, prime_ideals_up_to(&k, 1e3));

        // Flip a digit in the body.
        let mut text = String::from_utf8(bytes.clone()).unwrap();
        let pos = text.rfind("\n5,").unwrap() + 1;
        text.replace_range(pos..pos + 1, "7");
        fs::write(&first.path, text).unwrap();
        let rebuilt = cache_get_or_build(&k, 1e4, dir.path()).unwrap();
        assert_eq!(rebuilt.origin, CacheOrigin::Rebuilt);
        assert!(rebuilt.warnings.iter().any(|w| w.contains("checksum")));
        assert_eq!(fs::read(&first.path).unwrap(), bytes);
    }
}
