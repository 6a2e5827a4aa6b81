//! Line-oriented text formats: instances, template literals and distribution
//! files. `#` starts a comment that runs to the end of the line.
//!
//! Instance files:
//!
//! ```text
//! p gsat <n> <M> <k>
//! t <id> <arity> <hex-table>
//! c <template-id> <v1> ... <vk>     (1-based, order significant)
//! m <key> <value>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::constraint::{
    parse_prob, table_from_hex, table_to_hex, template_from_name, ConstraintDistribution,
    ConstraintTemplate, Prob,
};
use crate::error::{Error, Result};
use crate::instance::{AppliedConstraint, Instance};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "p gsat {} {} {}",
        inst.n,
        inst.constraints.len(),
        inst.max_arity()
    )
    .unwrap();
    for (key, value) in &inst.meta {
        writeln!(out, "m {} {}", key, value).unwrap();
    }
    for (id, t) in inst.templates.iter().enumerate() {
        writeln!(out, "t {} {} {}", id, t.arity(), table_to_hex(t)).unwrap();
    }
    for c in &inst.constraints {
        out.push_str("c ");
        out.push_str(&c.template.to_string());
        for v in &c.vars {
            out.push(' ');
            out.push_str(&(v + 1).to_string());
        }
        out.push('\n');
    }
    out
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        reason: format!("bad {} `{}`", what, tok),
    })
}

/// `t <id> <arity> <hex>` or a named shorthand. Returns the template, its id
/// (if written as a `t` line) and the remaining tokens.
pub fn parse_template_literal<'a>(
    tokens: &'a [&'a str],
    line: usize,
) -> Result<(ConstraintTemplate, Option<usize>, &'a [&'a str])> {
    let wrap = |e: Error| Error::Parse {
        line,
        reason: e.to_string(),
    };
    match tokens {
        ["t", id, arity, hex, rest @ ..] => {
            let id = parse_usize(id, line, "template id")?;
            let arity = parse_usize(arity, line, "arity")?;
            let t = table_from_hex(arity, hex).map_err(wrap)?;
            Ok((t, Some(id), rest))
        }
        ["t", ..] => Err(Error::Parse {
            line,
            reason: "expected `t <id> <arity> <hex>`".into(),
        }),
        [name, rest @ ..] => Ok((template_from_name(name).map_err(wrap)?, None, rest)),
        [] => Err(Error::Parse {
            line,
            reason: "empty template literal".into(),
        }),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut templates: BTreeMap<usize, (ConstraintTemplate, usize)> = BTreeMap::new();
    let mut raw_constraints: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut meta = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "p" => {
                if header.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: "duplicate header".into(),
                    });
                }
                if tokens.len() != 5 || tokens[1] != "gsat" {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: "expected `p gsat <n> <M> <k>`".into(),
                    });
                }
                header = Some((
                    parse_usize(tokens[2], line_no, "n")?,
                    parse_usize(tokens[3], line_no, "M")?,
                    parse_usize(tokens[4], line_no, "k")?,
                    line_no,
                ));
            }
            "t" => {
                let (t, id, rest) = parse_template_literal(&tokens, line_no)?;
                if !rest.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: format!("trailing tokens after template: {:?}", rest),
                    });
                }
                let id = id.expect("t line has an id");
                if templates.insert(id, (t, line_no)).is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: format!("template id {} declared twice", id),
                    });
                }
            }
            "c" => {
                if tokens.len() < 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: "constraint line without template id".into(),
                    });
                }
                let tid = parse_usize(tokens[1], line_no, "template id")?;
                let vars = tokens[2..]
                    .iter()
                    .map(|tok| {
                        let v = parse_usize(tok, line_no, "variable")?;
                        if v == 0 {
                            return Err(Error::Parse {
                                line: line_no,
                                reason: "variables are 1-based".into(),
                            });
                        }
                        Ok(v - 1)
                    })
                    .collect::<Result<Vec<_>>>()?;
                raw_constraints.push((line_no, tid, vars));
            }
            "m" => {
                let rest = line[1..].trim_start();
                let (key, value) = match rest.split_once(char::is_whitespace) {
                    Some((k, v)) => (k, v.trim()),
                    None => (rest, ""),
                };
                if key.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: "metadata line without key".into(),
                    });
                }
                meta.push((key.to_string(), value.to_string()));
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("unknown line type `{}`", other),
                })
            }
        }
    }

    let (n, m, k, header_line) = header.ok_or(Error::Parse {
        line: 0,
        reason: "missing `p gsat` header".into(),
    })?;
    let dense: BTreeMap<usize, usize> = templates
        .keys()
        .enumerate()
        .map(|(dense, &id)| (id, dense))
        .collect();
    let max_arity = templates.values().map(|(t, _)| t.arity()).max().unwrap_or(0);
    if !templates.is_empty() && max_arity != k {
        return Err(Error::Parse {
            line: header_line,
            reason: format!("header says k = {} but the largest template arity is {}", k, max_arity),
        });
    }
    let templates: Vec<ConstraintTemplate> = templates.into_values().map(|(t, _)| t).collect();

    let mut constraints = Vec::with_capacity(raw_constraints.len());
    for (line_no, tid, vars) in raw_constraints {
        let template = *dense.get(&tid).ok_or(Error::Parse {
            line: line_no,
            reason: format!("unknown template id {}", tid),
        })?;
        let arity = templates[template].arity();
        if vars.len() != arity {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("template {} has arity {}, got {} variables", tid, arity, vars.len()),
            });
        }
        if let Some(&v) = vars.iter().find(|&&v| v >= n) {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("variable {} exceeds n = {}", v + 1, n),
            });
        }
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse {
                line: line_no,
                reason: "variable repeated within a constraint".into(),
            });
        }
        constraints.push(AppliedConstraint { template, vars });
    }
    if constraints.len() != m {
        return Err(Error::Parse {
            line: header_line,
            reason: format!("header declares {} constraints, found {}", m, constraints.len()),
        });
    }
    Ok(Instance {
        n,
        templates,
        constraints,
        meta,
    })
}

/// A distribution file: one template literal per line, optionally followed
/// by a probability `p/q`. Without any probabilities the distribution is
/// uniform; otherwise every line needs one.
pub fn parse_distribution(text: &str) -> Result<ConstraintDistribution> {
    let mut templates = Vec::new();
    let mut probs: Vec<Option<Prob>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (t, _, rest) = parse_template_literal(&tokens, line_no)?;
        let p = match rest {
            [] => None,
            [p] => Some(parse_prob(p).map_err(|e| Error::Parse {
                line: line_no,
                reason: e.to_string(),
            })?),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("trailing tokens {:?}", rest),
                })
            }
        };
        templates.push(t);
        probs.push(p);
    }
    if probs.iter().all(Option::is_none) {
        return ConstraintDistribution::uniform(templates);
    }
    let probs = probs
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidDistribution("either all lines or none carry a probability".into()))?;
    ConstraintDistribution::new(templates, probs)
}

pub fn serialize_distribution(d: &ConstraintDistribution) -> String {
    let mut out = String::new();
    for (id, (t, p)) in d.templates().iter().zip(d.probs()).enumerate() {
        writeln!(out, "t {} {} {} {}", id, t.arity(), table_to_hex(t), p).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_ksat;

    #[test]
    fn header_fields() {
        let text = "p gsat 10 4 3\nt 0 3 fe\nc 0 1 2 3\nc 0 4 5 6\nc 0 7 8 9\nc 0 10 1 2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!((inst.n, inst.len(), inst.max_arity()), (10, 4, 3));
        assert_eq!(inst.constraints[3].vars, vec![9, 0, 1]);
    }

    #[test]
    fn unknown_template_is_named() {
        let err = parse_instance("p gsat 4 1 3\nt 0 3 fe\nc 7 1 2 3\n").unwrap_err();
        match err {
            Error::Parse { line, reason } => {
                assert_eq!(line, 3);
                assert!(reason.contains('7'), "{}", reason);
            }
            e => panic!("{:?}", e),
        }
    }

    #[test]
    fn malformed_inputs() {
        let bad = [
            "t 0 3 fe\n",
            "p gsat 4 1 3\nt 0 3 fe\nc 0 1 2\n",
            "p gsat 4 1 3\nt 0 3 fe\nc 0 1 2 5\n",
            "p gsat 4 1 3\nt 0 3 fe\nc 0 1 1 2\n",
            "p gsat 4 2 3\nt 0 3 fe\nc 0 1 2 3\n",
            "p gsat 4 0 3\nt 0 3 zz\n",
            "p gsat 4 0 3\nq\n",
            "p gsat 4 0 2\nt 0 3 fe\n",
        ];
        for b in bad {
            assert!(matches!(parse_instance(b), Err(Error::Parse { .. })), "{:?}", b);
        }
    }

    #[test]
    fn roundtrip_with_comments_and_meta() {
        let mut inst = gen_ksat(3, 12, 20, 9).unwrap();
        inst.set_meta("note", "two words");
        let text = serialize_instance(&inst);
        assert!(text.contains("m generator ksat k=3\n"));
        let commented = format!("# leading comment\n{}", text.replace("\nt 0", "  # tail\nt 0"));
        assert_eq!(parse_instance(&commented).unwrap(), inst);
    }

    #[test]
    fn distribution_files() {
        let d = parse_distribution("OR3 1/2\nNAE3 1/4  # comment\nt 9 3 96 1/4\n").unwrap();
        assert_eq!(d.templates()[2], ConstraintTemplate::xor3(true));
        assert_eq!(d.probs()[1], Prob::new(1, 4));
        let u = parse_distribution("CLAUSE2:++\nCLAUSE2:--\n").unwrap();
        assert_eq!(u.probs(), &[Prob::new(1, 2), Prob::new(1, 2)]);
        assert!(parse_distribution("OR3 1/2\nNAE3\n").is_err());
        assert!(parse_distribution("OR3 1/2\nNAE3 1/3\n").is_err());
        assert_eq!(parse_distribution(&serialize_distribution(&d)).unwrap(), d);
    }
}
