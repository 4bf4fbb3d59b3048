//! Category definition files: a line-oriented text format and an equivalent
//! JSON document. Declaration order fixes identifier order.
//!
//! ```text
//! category PS2
//! object P1
//! morphism id1 : P1 -> P1
//! identity P1 = id1
//! compose g . f = gf
//! null { m ... }            # or: null objects { P1 ... }; commas optional
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cat::{CategoryBuilder, CategoryError, FinCategory, MorId, ObjId};
use crate::ideal::{ideal_from_objects, Ideal, NullCategory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Semantic { line: usize, source: CategoryError },
    #[error("line {line}: unknown {kind} `{name}`")]
    Unknown {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// How the file declares its ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NullSpec {
    None,
    Members(Vec<MorId>),
    Objects(Vec<ObjId>),
}

#[derive(Debug, Clone)]
pub struct CategoryFile {
    pub cat: Arc<FinCategory>,
    pub null: NullSpec,
}

impl CategoryFile {
    pub fn ideal(&self) -> Ideal {
        match &self.null {
            NullSpec::None => Ideal::empty(&self.cat),
            NullSpec::Members(ms) => Ideal::from_members(&self.cat, ms.iter().copied()).expect("parsed ids"),
            NullSpec::Objects(zs) => ideal_from_objects(&self.cat, zs).expect("parsed ids"),
        }
    }

    pub fn null_category(&self) -> Arc<NullCategory> {
        Arc::new(NullCategory::new(self.cat.clone(), self.ideal()))
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses either format; JSON is recognised by a leading `{`.
pub fn parse_category(text: &str) -> Result<CategoryFile, ParseError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

struct Pending {
    builder: CategoryBuilder,
    null: Option<(usize, bool, Vec<String>)>,
}

fn parse_text(text: &str) -> Result<CategoryFile, ParseError> {
    let mut state: Option<Pending> = None;
    // An open `null { ... }` block spanning lines: (start line, objects?, tokens).
    let mut open_block: Option<(usize, bool, Vec<String>)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if let Some((start, objs, mut acc)) = open_block.take() {
            let mut closed = false;
            for t in tokens {
                if closed {
                    return Err(syntax(line, "unexpected text after `}`"));
                }
                if t == "}" {
                    closed = true;
                } else {
                    acc.push(t.to_string());
                }
            }
            if closed {
                set_null(&mut state, start, objs, acc)?;
            } else {
                open_block = Some((start, objs, acc));
            }
            continue;
        }
        let Some(&head) = tokens.first() else {
            continue;
        };
        if head == "category" {
            if state.is_some() {
                return Err(syntax(line, "category declared twice"));
            }
            let [_, name] = tokens[..] else {
                return Err(syntax(line, "expected `category <name>`"));
            };
            state = Some(Pending {
                builder: CategoryBuilder::new(name),
                null: None,
            });
            continue;
        }
        let known = ["object", "morphism", "identity", "compose", "null"];
        if !known.contains(&head) {
            return Err(syntax(line, format!("unknown directive `{head}`")));
        }
        let Some(p) = state.as_mut() else {
            return Err(syntax(line, "no category declared"));
        };
        let b = &mut p.builder;
        let semantic = |source| ParseError::Semantic { line, source };
        let obj = |b: &CategoryBuilder, name: &str| {
            b.object_id(name).ok_or_else(|| ParseError::Unknown {
                line,
                kind: "object",
                name: name.into(),
            })
        };
        let mor = |b: &CategoryBuilder, name: &str| {
            b.morphism_id(name).ok_or_else(|| ParseError::Unknown {
                line,
                kind: "morphism",
                name: name.into(),
            })
        };
        match head {
            "object" => {
                let [_, name] = tokens[..] else {
                    return Err(syntax(line, "expected `object <name>`"));
                };
                b.add_object(name).map_err(semantic)?;
            }
            "morphism" => {
                let [_, name, ":", dom, "->", cod] = tokens[..] else {
                    return Err(syntax(line, "expected `morphism <name> : <dom> -> <cod>`"));
                };
                let (d, c) = (obj(b, dom)?, obj(b, cod)?);
                b.add_morphism(name, d, c).map_err(semantic)?;
            }
            "identity" => {
                let [_, o, "=", m] = tokens[..] else {
                    return Err(syntax(line, "expected `identity <object> = <morphism>`"));
                };
                let (o, m) = (obj(b, o)?, mor(b, m)?);
                b.set_identity(o, m).map_err(semantic)?;
            }
            "compose" => {
                let [_, g, ".", f, "=", gf] = tokens[..] else {
                    return Err(syntax(line, "expected `compose <g> . <f> = <g∘f>`"));
                };
                let (g, f, gf) = (mor(b, g)?, mor(b, f)?, mor(b, gf)?);
                b.set_composite(g, f, gf).map_err(semantic)?;
            }
            "null" => {
                if p.null.is_some() {
                    return Err(syntax(line, "null block declared twice"));
                }
                let (objs, rest) = match tokens.get(1) {
                    Some(&"objects") => (true, &tokens[2..]),
                    _ => (false, &tokens[1..]),
                };
                let Some((&"{", body)) = rest.split_first() else {
                    return Err(syntax(line, "expected `null { ... }` or `null objects { ... }`"));
                };
                match body.iter().position(|&t| t == "}") {
                    Some(end) if end + 1 == body.len() => {
                        let acc = body[..end].iter().map(|s| s.to_string()).collect();
                        set_null(&mut state, line, objs, acc)?;
                    }
                    Some(_) => return Err(syntax(line, "unexpected text after `}`")),
                    None => open_block = Some((line, objs, body.iter().map(|s| s.to_string()).collect())),
                }
            }
            _ => unreachable!(),
        }
    }
    if let Some((start, _, _)) = open_block {
        return Err(syntax(start, "unterminated null block"));
    }
    let Some(p) = state else {
        return Err(CategoryError::Empty.into());
    };
    finish(p)
}

fn set_null(state: &mut Option<Pending>, line: usize, objs: bool, names: Vec<String>) -> Result<(), ParseError> {
    let p = state.as_mut().ok_or_else(|| syntax(line, "no category declared"))?;
    if p.null.is_some() {
        return Err(syntax(line, "null block declared twice"));
    }
    p.null = Some((line, objs, names));
    Ok(())
}

fn finish(p: Pending) -> Result<CategoryFile, ParseError> {
    let null = match &p.null {
        None => None,
        Some((line, objs, names)) => {
            let lookup = |n: &str| {
                if *objs {
                    p.builder.object_id(n).map(|o| o.0)
                } else {
                    p.builder.morphism_id(n).map(|m| m.0)
                }
            };
            let mut ids = Vec::new();
            for token in names {
                // Names may themselves contain commas; split only unknown tokens.
                let parts: Vec<&str> = match lookup(token) {
                    Some(_) => vec![token.as_str()],
                    None => token.split(',').filter(|n| !n.is_empty()).collect(),
                };
                for n in parts {
                    ids.push(lookup(n).ok_or_else(|| ParseError::Unknown {
                        line: *line,
                        kind: if *objs { "object" } else { "morphism" },
                        name: n.to_string(),
                    })?);
                }
            }
            Some((*objs, ids))
        }
    };
    let cat = p.builder.build()?;
    require_total(&cat)?;
    let null = match null {
        None => NullSpec::None,
        Some((true, ids)) => NullSpec::Objects(ids.into_iter().map(ObjId).collect()),
        Some((false, ids)) => NullSpec::Members(ids.into_iter().map(MorId).collect()),
    };
    Ok(CategoryFile {
        cat: Arc::new(cat),
        null,
    })
}

/// Every composable pair must have a declared composite.
fn require_total(c: &FinCategory) -> Result<(), CategoryError> {
    for f in c.morphisms() {
        for &g in c.outgoing(c.cod(f)) {
            if c.try_compose(g, f).is_none() {
                return Err(CategoryError::MissingComposite {
                    g: c.mor_name(g).into(),
                    f: c.mor_name(f).into(),
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonMorphism {
    name: String,
    dom: String,
    cod: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonCategory {
    category: String,
    objects: Vec<String>,
    morphisms: Vec<JsonMorphism>,
    /// `[object, identity]` pairs.
    identities: Vec<(String, String)>,
    /// `[g, f, g∘f]` triples.
    compose: Vec<(String, String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    null: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    null_objects: Option<Vec<String>>,
}

fn parse_json(text: &str) -> Result<CategoryFile, ParseError> {
    let j: JsonCategory = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    // Re-emit as text so both formats share one set of checks.
    let mut t = format!("category {}\n", j.category);
    for o in &j.objects {
        writeln!(t, "object {o}").unwrap();
    }
    for m in &j.morphisms {
        writeln!(t, "morphism {} : {} -> {}", m.name, m.dom, m.cod).unwrap();
    }
    for (o, m) in &j.identities {
        writeln!(t, "identity {o} = {m}").unwrap();
    }
    for (g, f, gf) in &j.compose {
        writeln!(t, "compose {g} . {f} = {gf}").unwrap();
    }
    if j.null.is_some() && j.null_objects.is_some() {
        return Err(ParseError::Json("both `null` and `null_objects` given".into()));
    }
    if let Some(ms) = &j.null {
        writeln!(t, "null {{ {} }}", ms.join(" ")).unwrap();
    }
    if let Some(os) = &j.null_objects {
        writeln!(t, "null objects {{ {} }}", os.join(" ")).unwrap();
    }
    parse_text(&t)
}

fn composites(c: &FinCategory) -> impl Iterator<Item = (MorId, MorId, MorId)> + '_ {
    c.morphisms().flat_map(move |f| {
        c.outgoing(c.cod(f))
            .iter()
            .filter_map(move |&g| c.try_compose(g, f).map(|gf| (g, f, gf)))
    })
}

/// Canonical text form: objects, morphisms, identities, then composites by
/// `f` and within that by `g`.
pub fn serialize_text(c: &FinCategory, null: &NullSpec) -> String {
    serialize_text_annotated(c, null, |_| None)
}

/// As [`serialize_text`], with an optional trailing comment per object.
pub fn serialize_text_annotated(c: &FinCategory, null: &NullSpec, note: impl Fn(ObjId) -> Option<String>) -> String {
    let mut t = String::new();
    writeln!(t, "category {}", c.name()).unwrap();
    for o in c.objects() {
        match note(o) {
            Some(n) => writeln!(t, "object {}  # {n}", c.obj_name(o)).unwrap(),
            None => writeln!(t, "object {}", c.obj_name(o)).unwrap(),
        }
    }
    for m in c.morphisms() {
        writeln!(
            t,
            "morphism {} : {} -> {}",
            c.mor_name(m),
            c.obj_name(c.dom(m)),
            c.obj_name(c.cod(m))
        )
        .unwrap();
    }
    for o in c.objects() {
        writeln!(t, "identity {} = {}", c.obj_name(o), c.mor_name(c.identity(o))).unwrap();
    }
    for (g, f, gf) in composites(c) {
        writeln!(t, "compose {} . {} = {}", c.mor_name(g), c.mor_name(f), c.mor_name(gf)).unwrap();
    }
    match null {
        NullSpec::None => {}
        NullSpec::Members(ms) => {
            let names: Vec<&str> = ms.iter().map(|&m| c.mor_name(m)).collect();
            writeln!(t, "null {{ {} }}", names.join(" ")).unwrap();
        }
        NullSpec::Objects(zs) => {
            let names: Vec<&str> = zs.iter().map(|&o| c.obj_name(o)).collect();
            writeln!(t, "null objects {{ {} }}", names.join(" ")).unwrap();
        }
    }
    t
}

pub fn serialize_json(c: &FinCategory, null: &NullSpec) -> String {
    let s = |x: &str| x.to_string();
    let j = JsonCategory {
        category: s(c.name()),
        objects: c.objects().map(|o| s(c.obj_name(o))).collect(),
        morphisms: c
            .morphisms()
            .map(|m| JsonMorphism {
                name: s(c.mor_name(m)),
                dom: s(c.obj_name(c.dom(m))),
                cod: s(c.obj_name(c.cod(m))),
            })
            .collect(),
        identities: c
            .objects()
            .map(|o| (s(c.obj_name(o)), s(c.mor_name(c.identity(o)))))
            .collect(),
        compose: composites(c)
            .map(|(g, f, gf)| (s(c.mor_name(g)), s(c.mor_name(f)), s(c.mor_name(gf))))
            .collect(),
        null: match null {
            NullSpec::Members(ms) => Some(ms.iter().map(|&m| s(c.mor_name(m))).collect()),
            _ => None,
        },
        null_objects: match null {
            NullSpec::Objects(zs) => Some(zs.iter().map(|&o| s(c.obj_name(o))).collect()),
            _ => None,
        },
    };
    serde_json::to_string_pretty(&j).expect("serializable")
}
