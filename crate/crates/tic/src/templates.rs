//! Template files: one `test <functor>(<slot>,...)` per line, where a slot
//! is `+type` (a variable already bound on the path), `-type` (a new
//! variable) or `#type` (a constant observed in the data). `%` starts a
//! comment.

use std::fs;
use std::path::Path;

use tic_core::logic::{Slot, SlotMode, Template};
use tic_core::TemplateSet;

use crate::error::{Result, TicError};
use crate::interp::syntax;

pub fn read_templates(path: &Path) -> Result<TemplateSet> {
    let text = fs::read_to_string(path).map_err(|e| TicError::io(path, e))?;
    parse_templates(&text, path)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase()) && chars.all(|c| c.is_alphanumeric() || c == '_')
}

pub fn parse_templates(text: &str, path: &Path) -> Result<TemplateSet> {
    let mut templates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('%').next().unwrap_or("");
        let trimmed = body.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = body.len() - trimmed.len();
        let line = i + 1;
        let Some(rest) = trimmed.strip_prefix("test") else {
            return Err(syntax(path, line, indent + 1, "expected `test`"));
        };
        if !rest.starts_with(char::is_whitespace) {
            return Err(syntax(path, line, indent + 1, "expected `test`"));
        }
        let decl = rest.trim();
        let col = indent + 1 + (trimmed.len() - rest.trim_start().len());
        let (functor, args) = decl.split_once('(').ok_or_else(|| syntax(path, line, col, "expected `(`"))?;
        let functor = functor.trim();
        if !is_ident(functor) {
            return Err(syntax(path, line, col, format!("`{functor}` is not a valid functor")));
        }
        let args =
            args.trim_end().strip_suffix(')').ok_or_else(|| syntax(path, line, col, "expected `)` at end of line"))?;
        let mut slots = Vec::new();
        let mut offset = col + functor.len() + 1;
        for part in args.split(',') {
            let p = part.trim();
            let at = offset + (part.len() - part.trim_start().len());
            offset += part.len() + 1;
            let mode = match p.chars().next() {
                Some('+') => SlotMode::Bound,
                Some('-') => SlotMode::Fresh,
                Some('#') => SlotMode::Constant,
                _ => return Err(syntax(path, line, at, format!("slot `{p}` must start with +, - or #"))),
            };
            let ty = &p[1..];
            if !is_ident(ty) {
                return Err(syntax(path, line, at, format!("`{ty}` is not a valid type name")));
            }
            slots.push(Slot { mode, ty: ty.to_string() });
        }
        templates.push(Template { functor: functor.to_string(), slots });
    }
    TemplateSet::new(templates).map_err(TicError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_slots_in_order() {
        let t = parse_templates("% chem\ntest atom(+mol, #elem)\n  test bond(+atom,-atom)\n", Path::new("t")).unwrap();
        let shown: Vec<String> = t.templates().iter().map(|t| t.to_string()).collect();
        assert_eq!(shown, ["atom(+mol,#elem)", "bond(+atom,-atom)"]);
    }

    #[test]
    fn reports_column_of_bad_slot() {
        match parse_templates("test atom(+mol, elem)", Path::new("t")).unwrap_err() {
            TicError::Syntax { line, column, .. } => assert_eq!((line, column), (1, 17)),
            e => panic!("{e}"),
        }
        assert!(parse_templates("tst atom(+m)", Path::new("t")).is_err());
        assert!(parse_templates("test Atom(+m)", Path::new("t")).is_err());
        assert!(parse_templates("test atom(+m", Path::new("t")).is_err());
        assert!(matches!(
            parse_templates("test a(+m)\ntest a(+m)", Path::new("t")),
            Err(TicError::Core(tic_core::Error::DuplicateTemplate(_)))
        ));
    }
}
