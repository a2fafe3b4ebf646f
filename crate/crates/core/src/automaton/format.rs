//! Line-oriented model file format.
//!
//! ```text
//! alphabet a b c d
//! states 1 2 3 4
//! initial 1
//! final 1 2 3 4
//! trans 1 a 3
//! ```
//!
//! `#` starts a comment. Directives may repeat and appear in any order;
//! references are resolved once the whole file is read.

use std::collections::HashMap;
use std::fmt::Write;

use super::{Automaton, StateId, Transition};
use crate::error::{Error, Result};

pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let mut states: Vec<String> = Vec::new();
    let mut alphabet: Vec<String> = Vec::new();
    let mut initial: Vec<(usize, String)> = Vec::new();
    let mut finals: Vec<(usize, String)> = Vec::new();
    let mut trans: Vec<(usize, String, String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(directive) = words.next() else {
            continue;
        };
        let args: Vec<&str> = words.collect();
        match directive {
            "alphabet" => alphabet.extend(args.iter().map(|s| s.to_string())),
            "states" => states.extend(args.iter().map(|s| s.to_string())),
            "initial" => initial.extend(args.iter().map(|s| (line, s.to_string()))),
            "final" => finals.extend(args.iter().map(|s| (line, s.to_string()))),
            "trans" => {
                if args.len() != 3 {
                    return Err(Error::Syntax {
                        line,
                        message: format!("`trans` expects 3 fields, found {}", args.len()),
                    });
                }
                trans.push((line, args[0].into(), args[1].into(), args[2].into()));
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }

    let state_ids = index_names(&states, "state")?;
    let symbol_ids = index_names(&alphabet, "symbol")?;
    let state = |line: usize, name: &str| -> Result<StateId> {
        state_ids
            .get(name)
            .copied()
            .ok_or_else(|| Error::UndeclaredState {
                line,
                name: name.to_string(),
            })
    };

    let initials = initial
        .iter()
        .map(|(line, name)| state(*line, name))
        .collect::<Result<Vec<_>>>()?;
    let final_ids = finals
        .iter()
        .map(|(line, name)| state(*line, name))
        .collect::<Result<Vec<_>>>()?;
    if initials.is_empty() {
        return Err(Error::EmptyInitial);
    }
    if final_ids.is_empty() {
        return Err(Error::EmptyFinal);
    }

    let mut transitions = Vec::with_capacity(trans.len());
    let mut seen: HashMap<Transition, usize> = HashMap::with_capacity(trans.len());
    for (line, p, a, q) in &trans {
        let source = state(*line, p)?;
        let symbol = *symbol_ids
            .get(a.as_str())
            .ok_or_else(|| Error::UndeclaredSymbol {
                line: *line,
                name: a.clone(),
            })?;
        let target = state(*line, q)?;
        let t = Transition::new(source, symbol, target);
        if let Some(first) = seen.insert(t, *line) {
            return Err(Error::Syntax {
                line: *line,
                message: format!("duplicate transition `{p} {a} {q}` (first on line {first})"),
            });
        }
        transitions.push(t);
    }

    Automaton::new(states, alphabet, transitions, initials, final_ids)
}

fn index_names<'a>(names: &'a [String], what: &str) -> Result<HashMap<&'a str, u32>> {
    let mut ids = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if ids.insert(name.as_str(), i as u32).is_some() {
            return Err(Error::InvalidAutomaton(format!(
                "{what} `{name}` declared twice"
            )));
        }
    }
    Ok(ids)
}

/// Deterministic rendering: states in id order, transitions sorted.
pub(super) fn serialize(a: &Automaton) -> String {
    let mut out = String::new();
    let join = |it: &mut dyn Iterator<Item = &str>| it.collect::<Vec<_>>().join(" ");
    let _ = writeln!(
        out,
        "alphabet {}",
        join(&mut a.alphabet().iter().map(String::as_str))
    );
    let _ = writeln!(
        out,
        "states {}",
        join(&mut a.state_names().iter().map(String::as_str))
    );
    let _ = writeln!(
        out,
        "initial {}",
        join(&mut a.initials().iter().map(|&s| a.state_name(s)))
    );
    let _ = writeln!(
        out,
        "final {}",
        join(&mut a.finals().iter().map(|&s| a.state_name(s)))
    );
    for t in a.transitions() {
        let _ = writeln!(
            out,
            "trans {} {} {}",
            a.state_name(t.source),
            a.symbol_name(t.symbol),
            a.state_name(t.target)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::tests::{fig1, FIG1};

    #[test]
    fn parses_fig1() {
        let a = fig1();
        assert_eq!(a.num_states(), 4);
        assert_eq!(a.num_transitions(), 9);
        assert_eq!(a.initials(), &[0]);
        assert_eq!(a.finals().len(), 4);
        assert_eq!(a.alphabet().len(), 4);
        let _ = FIG1;
    }

    #[test]
    fn undeclared_state_reports_line() {
        let err = parse_automaton("alphabet a\nstates 1 2\ninitial 1\nfinal 2\ntrans 1 a 5\n")
            .unwrap_err();
        assert_eq!(
            err,
            Error::UndeclaredState {
                line: 5,
                name: "5".into()
            }
        );
    }

    #[test]
    fn undeclared_symbol_reports_line() {
        let err = parse_automaton("alphabet a\nstates 1\ninitial 1\nfinal 1\n\ntrans 1 z 1\n")
            .unwrap_err();
        assert_eq!(
            err,
            Error::UndeclaredSymbol {
                line: 6,
                name: "z".into()
            }
        );
    }

    #[test]
    fn syntax_errors() {
        let err = parse_automaton("alphabet a\nstates 1\nbogus 1\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }));
        let err =
            parse_automaton("alphabet a\nstates 1\ninitial 1\nfinal 1\ntrans 1 a\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 5, .. }));
        let err = parse_automaton(
            "alphabet a\nstates 1\ninitial 1\nfinal 1\ntrans 1 a 1\ntrans 1 a 1 # again\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 6, .. }));
    }

    #[test]
    fn empty_initial_or_final() {
        assert_eq!(
            parse_automaton("alphabet a\nstates 1\nfinal 1\n"),
            Err(Error::EmptyInitial)
        );
        assert_eq!(
            parse_automaton("alphabet a\nstates 1\ninitial 1\n"),
            Err(Error::EmptyFinal)
        );
    }

    #[test]
    fn single_state_no_transitions() {
        let a = parse_automaton("states q\ninitial q\nfinal q\n").unwrap();
        assert_eq!(a.num_states(), 1);
        assert_eq!(a.num_transitions(), 0);
    }

    #[test]
    fn serialize_is_sorted_and_reparses() {
        let a = fig1();
        let text = a.to_string();
        assert!(text.starts_with("alphabet a b c d\nstates 1 2 3 4\ninitial 1\nfinal 1 2 3 4\n"));
        let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("trans")).collect();
        assert_eq!(lines[0], "trans 1 a 3");
        assert_eq!(lines[1], "trans 1 b 2");
        assert_eq!(parse_automaton(&text).unwrap(), a);
        assert_eq!(parse_automaton(&text).unwrap().to_string(), text);
    }
}
