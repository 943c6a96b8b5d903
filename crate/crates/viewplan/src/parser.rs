//! Text formats: `.dom` (domain), `.prob` (problem), `.views` (view stack),
//! plus canonical serializers for all three.
//!
//! `.dom` and `.prob` are s-expression files in the familiar planning style,
//! with two extra domain sections:
//! * `(:groups (required ...) (elementary ...) (spatial ...) (device ...))`
//!   assigns every predicate to exactly one group; groups are what views are
//!   made of.
//! * `(:families (temperature hot warm cold) ...)` (optional) names the
//!   mutual-exclusion family of each predicate. Predicates not covered
//!   default to a family named after their group.
//!
//! `.views` is line-based: one view per line, either a group shorthand such
//! as `R+E+S` (single token, `+`-separated group symbols) or an explicit
//! whitespace-separated predicate list. Lines are cumulative keep-sets and
//! must grow strictly; the final line must cover every declared predicate.
//! `#` starts a comment; blank lines are skipped.
//!
//! The serializers emit a canonical form (sorted object lines, fixed
//! indentation, sets in their natural order), so `serialize(parse(text)) ==
//! text` holds for any file the serializers produced. Parsing is strict:
//! unknown names, arity or type violations, duplicates, and negated
//! preconditions are errors, never silently coerced.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    ActionSchema, Atom, Domain, Group, Literal, PredicateSchema, Problem, Term,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: type `{ty}` is not declared")]
    UndeclaredType { ty: String, line: usize, col: usize },
    #[error("{line}:{col}: predicate `{pred}` is declared twice")]
    DuplicatePredicate { pred: String, line: usize, col: usize },
    #[error("{line}:{col}: action `{action}` is declared twice")]
    DuplicateAction { action: String, line: usize, col: usize },
    #[error("{line}:{col}: action `{action}` has a negated precondition")]
    NegatedPrecondition { action: String, line: usize, col: usize },
    #[error("{line}:{col}: goal atoms must be positive")]
    NegatedGoal { line: usize, col: usize },
    #[error("{line}:{col}: unknown predicate `{pred}`")]
    UnknownPredicate { pred: String, line: usize, col: usize },
    #[error("{line}:{col}: unknown object `{object}`")]
    UnknownObject { object: String, line: usize, col: usize },
    #[error("{line}:{col}: variable ?{variable} is not a parameter of action `{action}`")]
    UnknownVariable {
        action: String,
        variable: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: predicate `{pred}` expects {expected} arguments, got {got}")]
    Arity {
        pred: String,
        expected: usize,
        got: usize,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: object `{object}` lacks type `{ty}` required at position {position} of `{pred}`")]
    TypeMismatch {
        object: String,
        ty: String,
        position: usize,
        pred: String,
        line: usize,
        col: usize,
    },
    #[error("problem references domain `{found}`, but the loaded domain is `{expected}`")]
    DomainMismatch { expected: String, found: String },
    #[error("{line}:{col}: predicate `{pred}` is assigned to more than one group")]
    GroupConflict { pred: String, line: usize, col: usize },
    #[error("predicate `{pred}` is not assigned to any group")]
    MissingGroup { pred: String },
    #[error("{line}:{col}: predicate `{pred}` is assigned to more than one family")]
    FamilyConflict { pred: String, line: usize, col: usize },
    #[error("line {line}: unknown group symbol `{symbol}` in view shorthand")]
    UnknownGroup { symbol: String, line: usize },
    #[error("line {line}: view {view} is not a strict superset of the previous view")]
    NonMonotoneViews { view: usize, line: usize },
    #[error("final view does not cover every predicate; missing: {}", missing.join(" "))]
    IncompleteFinalView { missing: Vec<String> },
    #[error("views file declares no views")]
    EmptyViews,
}

// ---------------------------------------------------------------------------
// S-expression scanning
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum SExprKind {
    Sym(String),
    List(Vec<SExpr>),
}

#[derive(Debug, Clone)]
struct SExpr {
    kind: SExprKind,
    line: usize,
    col: usize,
}

impl SExpr {
    fn sym(&self) -> Option<&str> {
        match &self.kind {
            SExprKind::Sym(s) => Some(s),
            SExprKind::List(_) => None,
        }
    }

    fn list(&self) -> Option<&[SExpr]> {
        match &self.kind {
            SExprKind::List(items) => Some(items),
            SExprKind::Sym(_) => None,
        }
    }

    fn expect_sym(&self, what: &str) -> Result<&str, ParseError> {
        self.sym().ok_or_else(|| self.err(format!("expected {what}")))
    }

    fn expect_list(&self, what: &str) -> Result<&[SExpr], ParseError> {
        self.list().ok_or_else(|| self.err(format!("expected {what}")))
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }
}

#[derive(Debug)]
enum Token {
    Open { line: usize, col: usize },
    Close { line: usize, col: usize },
    Sym { text: String, line: usize, col: usize },
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => {
                line += 1;
                col = 1;
            }
            ';' => {
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                }
                col += 1;
            }
            '(' => {
                tokens.push(Token::Open { line, col });
                col += 1;
            }
            ')' => {
                tokens.push(Token::Close { line, col });
                col += 1;
            }
            c if c.is_whitespace() => {
                col += 1;
            }
            c => {
                let (tl, tc) = (line, col);
                let mut text = String::new();
                text.push(c);
                col += 1;
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == ';' {
                        break;
                    }
                    text.push(n);
                    chars.next();
                    col += 1;
                }
                tokens.push(Token::Sym {
                    text,
                    line: tl,
                    col: tc,
                });
            }
        }
    }
    tokens
}

fn parse_sexpr(text: &str) -> Result<SExpr, ParseError> {
    let tokens = tokenize(text);
    let mut idx = 0usize;
    let expr = parse_one(&tokens, &mut idx)?;
    if idx != tokens.len() {
        let (line, col) = token_pos(&tokens[idx]);
        return Err(ParseError::Syntax {
            line,
            col,
            msg: "unexpected trailing content".into(),
        });
    }
    Ok(expr)
}

fn token_pos(tok: &Token) -> (usize, usize) {
    match tok {
        Token::Open { line, col } | Token::Close { line, col } => (*line, *col),
        Token::Sym { line, col, .. } => (*line, *col),
    }
}

fn parse_one(tokens: &[Token], idx: &mut usize) -> Result<SExpr, ParseError> {
    match tokens.get(*idx) {
        None => Err(ParseError::Syntax {
            line: 0,
            col: 0,
            msg: "unexpected end of input".into(),
        }),
        Some(Token::Sym { text, line, col }) => {
            *idx += 1;
            Ok(SExpr {
                kind: SExprKind::Sym(text.clone()),
                line: *line,
                col: *col,
            })
        }
        Some(Token::Close { line, col }) => Err(ParseError::Syntax {
            line: *line,
            col: *col,
            msg: "unexpected `)`".into(),
        }),
        Some(Token::Open { line, col }) => {
            let (line, col) = (*line, *col);
            *idx += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*idx) {
                    None => {
                        return Err(ParseError::Syntax {
                            line,
                            col,
                            msg: "unclosed `(`".into(),
                        })
                    }
                    Some(Token::Close { .. }) => {
                        *idx += 1;
                        break;
                    }
                    Some(_) => items.push(parse_one(tokens, idx)?),
                }
            }
            Ok(SExpr {
                kind: SExprKind::List(items),
                line,
                col,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Domain parsing
// ---------------------------------------------------------------------------

/// Parse a typed element run: `a b - t c - u ...`. Elements must be
/// variables (`?x`) when `vars` is true, plain names otherwise. Every
/// element must receive a type, and every type must be declared.
fn parse_typed_elements(
    items: &[SExpr],
    vars: bool,
    types: &IndexSet<String>,
) -> Result<Vec<(String, String)>, ParseError> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut pending: Vec<(String, usize, usize)> = Vec::new();
    let mut i = 0usize;
    while i < items.len() {
        let sym = items[i].expect_sym("a name or `-`")?;
        if sym == "-" {
            let ty_expr = items.get(i + 1).ok_or_else(|| {
                items[i].err("expected a type after `-`")
            })?;
            let ty = ty_expr.expect_sym("a type name")?;
            if !types.contains(ty) {
                return Err(ParseError::UndeclaredType {
                    ty: ty.to_string(),
                    line: ty_expr.line,
                    col: ty_expr.col,
                });
            }
            if pending.is_empty() {
                return Err(items[i].err("`-` with no names before it"));
            }
            for (name, _, _) in pending.drain(..) {
                out.push((name, ty.to_string()));
            }
            i += 2;
        } else {
            let name = if vars {
                match sym.strip_prefix('?') {
                    Some(v) if !v.is_empty() => v.to_string(),
                    _ => return Err(items[i].err(format!("expected a variable, got `{sym}`"))),
                }
            } else {
                if sym.starts_with('?') {
                    return Err(items[i].err(format!("expected an object name, got `{sym}`")));
                }
                sym.to_string()
            };
            pending.push((name, items[i].line, items[i].col));
            i += 1;
        }
    }
    if let Some((name, line, col)) = pending.first() {
        return Err(ParseError::Syntax {
            line: *line,
            col: *col,
            msg: format!("`{name}` has no type annotation"),
        });
    }
    Ok(out)
}

/// Parse a lifted literal `(pred term...)` against the declared predicates,
/// resolving `?x` terms to parameters of `action` and everything else to
/// constants.
fn parse_schema_literal(
    expr: &SExpr,
    action: &str,
    params: &[(String, String)],
    predicates: &IndexMap<String, PredicateSchema>,
) -> Result<Literal, ParseError> {
    let items = expr.expect_list("a literal")?;
    let head = items
        .first()
        .ok_or_else(|| expr.err("empty literal"))?
        .expect_sym("a predicate name")?;
    let schema = predicates
        .get(head)
        .ok_or_else(|| ParseError::UnknownPredicate {
            pred: head.to_string(),
            line: expr.line,
            col: expr.col,
        })?;
    let args = &items[1..];
    if args.len() != schema.arity() {
        return Err(ParseError::Arity {
            pred: head.to_string(),
            expected: schema.arity(),
            got: args.len(),
            line: expr.line,
            col: expr.col,
        });
    }
    let mut terms = Vec::with_capacity(args.len());
    for arg in args {
        let sym = arg.expect_sym("a term")?;
        match sym.strip_prefix('?') {
            Some(v) => {
                if !params.iter().any(|(p, _)| p == v) {
                    return Err(ParseError::UnknownVariable {
                        action: action.to_string(),
                        variable: v.to_string(),
                        line: arg.line,
                        col: arg.col,
                    });
                }
                terms.push(Term::var(v));
            }
            None => terms.push(Term::obj(sym)),
        }
    }
    Ok(Literal::positive(head, terms))
}

/// Flatten `(and x...)` into its items; a bare literal stands for itself.
fn conjuncts(expr: &SExpr) -> Vec<&SExpr> {
    if let Some(items) = expr.list() {
        if items.first().and_then(SExpr::sym) == Some("and") {
            return items[1..].iter().collect();
        }
    }
    vec![expr]
}

pub fn parse_domain(text: &str) -> Result<Domain, ParseError> {
    let top = parse_sexpr(text)?;
    let items = top.expect_list("(define ...)")?;
    if items.first().and_then(SExpr::sym) != Some("define") {
        return Err(top.err("expected (define (domain ...) ...)"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| top.err("missing (domain NAME)"))?;
    let header_items = header.expect_list("(domain NAME)")?;
    if header_items.first().and_then(SExpr::sym) != Some("domain") || header_items.len() != 2 {
        return Err(header.err("expected (domain NAME)"));
    }
    let name = header_items[1].expect_sym("a domain name")?.to_string();

    let mut types: IndexSet<String> = IndexSet::new();
    // name -> (param types, declaration position)
    let mut raw_preds: IndexMap<String, Vec<String>> = IndexMap::new();
    let mut groups_section: Option<&SExpr> = None;
    let mut families_section: Option<&SExpr> = None;
    let mut action_sections: Vec<&SExpr> = Vec::new();

    for section in &items[2..] {
        let sec_items = section.expect_list("a domain section")?;
        let head = sec_items
            .first()
            .ok_or_else(|| section.err("empty section"))?
            .expect_sym("a section keyword")?;
        match head {
            ":types" => {
                for t in &sec_items[1..] {
                    let ty = t.expect_sym("a type name")?;
                    if !types.insert(ty.to_string()) {
                        return Err(t.err(format!("type `{ty}` is declared twice")));
                    }
                }
            }
            ":predicates" => {
                for p in &sec_items[1..] {
                    let p_items = p.expect_list("a predicate declaration")?;
                    let p_name = p_items
                        .first()
                        .ok_or_else(|| p.err("empty predicate declaration"))?
                        .expect_sym("a predicate name")?;
                    let params = parse_typed_elements(&p_items[1..], true, &types)?;
                    let param_types = params.into_iter().map(|(_, t)| t).collect();
                    if raw_preds
                        .insert(p_name.to_string(), param_types)
                        .is_some()
                    {
                        return Err(ParseError::DuplicatePredicate {
                            pred: p_name.to_string(),
                            line: p.line,
                            col: p.col,
                        });
                    }
                }
            }
            ":groups" => groups_section = Some(section),
            ":families" => families_section = Some(section),
            ":action" => action_sections.push(section),
            other => return Err(section.err(format!("unknown section `{other}`"))),
        }
    }

    // Group assignment.
    let mut group_of: BTreeMap<String, Group> = BTreeMap::new();
    if let Some(section) = groups_section {
        let sec_items = section.list().unwrap();
        for entry in &sec_items[1..] {
            let e_items = entry.expect_list("a group entry")?;
            let kw = e_items
                .first()
                .ok_or_else(|| entry.err("empty group entry"))?
                .expect_sym("a group keyword")?;
            let group = Group::from_keyword(kw)
                .ok_or_else(|| entry.err(format!("unknown group keyword `{kw}`")))?;
            for m in &e_items[1..] {
                let pred = m.expect_sym("a predicate name")?;
                if !raw_preds.contains_key(pred) {
                    return Err(ParseError::UnknownPredicate {
                        pred: pred.to_string(),
                        line: m.line,
                        col: m.col,
                    });
                }
                if group_of.insert(pred.to_string(), group).is_some() {
                    return Err(ParseError::GroupConflict {
                        pred: pred.to_string(),
                        line: m.line,
                        col: m.col,
                    });
                }
            }
        }
    }
    for pred in raw_preds.keys() {
        if !group_of.contains_key(pred) {
            return Err(ParseError::MissingGroup { pred: pred.clone() });
        }
    }

    // Family assignment (optional; defaults to the group keyword).
    let mut family_of: BTreeMap<String, String> = BTreeMap::new();
    if let Some(section) = families_section {
        let sec_items = section.list().unwrap();
        for entry in &sec_items[1..] {
            let e_items = entry.expect_list("a family entry")?;
            let fam = e_items
                .first()
                .ok_or_else(|| entry.err("empty family entry"))?
                .expect_sym("a family name")?;
            for m in &e_items[1..] {
                let pred = m.expect_sym("a predicate name")?;
                if !raw_preds.contains_key(pred) {
                    return Err(ParseError::UnknownPredicate {
                        pred: pred.to_string(),
                        line: m.line,
                        col: m.col,
                    });
                }
                if family_of.insert(pred.to_string(), fam.to_string()).is_some() {
                    return Err(ParseError::FamilyConflict {
                        pred: pred.to_string(),
                        line: m.line,
                        col: m.col,
                    });
                }
            }
        }
    }

    let mut predicates: IndexMap<String, PredicateSchema> = IndexMap::new();
    for (p_name, param_types) in raw_preds {
        let group = group_of[&p_name];
        let family = family_of
            .get(&p_name)
            .cloned()
            .unwrap_or_else(|| group.keyword().to_string());
        predicates.insert(
            p_name.clone(),
            PredicateSchema {
                name: p_name,
                param_types,
                group,
                family,
            },
        );
    }

    // Actions.
    let mut actions: IndexMap<String, ActionSchema> = IndexMap::new();
    for section in action_sections {
        let sec_items = section.list().unwrap();
        let a_name = sec_items
            .get(1)
            .ok_or_else(|| section.err("missing action name"))?
            .expect_sym("an action name")?
            .to_string();
        let mut params: Option<Vec<(String, String)>> = None;
        let mut pre_expr: Option<&SExpr> = None;
        let mut eff_expr: Option<&SExpr> = None;
        let mut i = 2usize;
        while i < sec_items.len() {
            let kw = sec_items[i].expect_sym("an action keyword")?;
            let value = sec_items
                .get(i + 1)
                .ok_or_else(|| sec_items[i].err(format!("`{kw}` has no value")))?;
            match kw {
                ":parameters" => {
                    let p_items = value.expect_list("a parameter list")?;
                    params = Some(parse_typed_elements(p_items, true, &types)?);
                }
                ":precondition" => pre_expr = Some(value),
                ":effect" => eff_expr = Some(value),
                other => return Err(sec_items[i].err(format!("unknown action keyword `{other}`"))),
            }
            i += 2;
        }
        let params = params.ok_or_else(|| section.err("action is missing :parameters"))?;
        let pre_expr = pre_expr.ok_or_else(|| section.err("action is missing :precondition"))?;
        let eff_expr = eff_expr.ok_or_else(|| section.err("action is missing :effect"))?;

        let mut pre: BTreeSet<Literal> = BTreeSet::new();
        for c in conjuncts(pre_expr) {
            if let Some(items) = c.list() {
                if items.first().and_then(SExpr::sym) == Some("not") {
                    return Err(ParseError::NegatedPrecondition {
                        action: a_name.clone(),
                        line: c.line,
                        col: c.col,
                    });
                }
            }
            pre.insert(parse_schema_literal(c, &a_name, &params, &predicates)?);
        }
        let mut add: BTreeSet<Literal> = BTreeSet::new();
        let mut del: BTreeSet<Literal> = BTreeSet::new();
        for c in conjuncts(eff_expr) {
            let items = c.expect_list("an effect literal")?;
            if items.first().and_then(SExpr::sym) == Some("not") {
                if items.len() != 2 {
                    return Err(c.err("(not ...) takes exactly one literal"));
                }
                del.insert(parse_schema_literal(
                    &items[1], &a_name, &params, &predicates,
                )?);
            } else {
                add.insert(parse_schema_literal(c, &a_name, &params, &predicates)?);
            }
        }

        let schema = ActionSchema::new(a_name.clone(), params, pre, add, del);
        if actions.insert(a_name.clone(), schema).is_some() {
            return Err(ParseError::DuplicateAction {
                action: a_name,
                line: section.line,
                col: section.col,
            });
        }
    }

    Ok(Domain {
        name,
        types,
        predicates,
        actions,
    })
}

// ---------------------------------------------------------------------------
// Problem parsing
// ---------------------------------------------------------------------------

fn parse_ground_atom(
    expr: &SExpr,
    domain: &Domain,
    objects: &IndexMap<String, BTreeSet<String>>,
) -> Result<Atom, ParseError> {
    let items = expr.expect_list("an atom")?;
    let head = items
        .first()
        .ok_or_else(|| expr.err("empty atom"))?
        .expect_sym("a predicate name")?;
    let schema = domain
        .predicates
        .get(head)
        .ok_or_else(|| ParseError::UnknownPredicate {
            pred: head.to_string(),
            line: expr.line,
            col: expr.col,
        })?;
    let args = &items[1..];
    if args.len() != schema.arity() {
        return Err(ParseError::Arity {
            pred: head.to_string(),
            expected: schema.arity(),
            got: args.len(),
            line: expr.line,
            col: expr.col,
        });
    }
    let mut out_args = Vec::with_capacity(args.len());
    for (position, arg) in args.iter().enumerate() {
        let sym = arg.expect_sym("an object name")?;
        if sym.starts_with('?') {
            return Err(arg.err("ground atoms cannot contain variables"));
        }
        let tys = objects.get(sym).ok_or_else(|| ParseError::UnknownObject {
            object: sym.to_string(),
            line: arg.line,
            col: arg.col,
        })?;
        let expected_ty = &schema.param_types[position];
        if !tys.contains(expected_ty) {
            return Err(ParseError::TypeMismatch {
                object: sym.to_string(),
                ty: expected_ty.clone(),
                position,
                pred: head.to_string(),
                line: arg.line,
                col: arg.col,
            });
        }
        out_args.push(sym.to_string());
    }
    Ok(Atom {
        pred: head.to_string(),
        args: out_args,
    })
}

pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, ParseError> {
    let top = parse_sexpr(text)?;
    let items = top.expect_list("(define ...)")?;
    if items.first().and_then(SExpr::sym) != Some("define") {
        return Err(top.err("expected (define (problem ...) ...)"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| top.err("missing (problem NAME)"))?;
    let header_items = header.expect_list("(problem NAME)")?;
    if header_items.first().and_then(SExpr::sym) != Some("problem") || header_items.len() != 2 {
        return Err(header.err("expected (problem NAME)"));
    }
    let name = header_items[1].expect_sym("a problem name")?.to_string();

    let mut domain_name: Option<String> = None;
    let mut objects: IndexMap<String, BTreeSet<String>> = IndexMap::new();
    let mut init: BTreeSet<Atom> = BTreeSet::new();
    let mut goal: BTreeSet<Atom> = BTreeSet::new();
    let mut saw_objects = false;
    let mut saw_init = false;
    let mut saw_goal = false;

    for section in &items[2..] {
        let sec_items = section.expect_list("a problem section")?;
        let head = sec_items
            .first()
            .ok_or_else(|| section.err("empty section"))?
            .expect_sym("a section keyword")?;
        match head {
            ":domain" => {
                let dn = sec_items
                    .get(1)
                    .ok_or_else(|| section.err("missing domain name"))?
                    .expect_sym("a domain name")?;
                domain_name = Some(dn.to_string());
            }
            ":objects" => {
                saw_objects = true;
                for (obj, ty) in parse_typed_elements(&sec_items[1..], false, &domain.types)? {
                    objects.entry(obj).or_default().insert(ty);
                }
            }
            ":init" => {
                saw_init = true;
                for atom_expr in &sec_items[1..] {
                    init.insert(parse_ground_atom(atom_expr, domain, &objects)?);
                }
            }
            ":goal" => {
                saw_goal = true;
                if let Some(goal_expr) = sec_items.get(1) {
                    for c in conjuncts(goal_expr) {
                        // `(and)` yields no conjuncts; `(and (p x))` yields atoms.
                        if c.list().map_or(false, |l| l.is_empty()) {
                            continue;
                        }
                        if let Some(l) = c.list() {
                            if l.first().and_then(SExpr::sym) == Some("not") {
                                return Err(ParseError::NegatedGoal {
                                    line: c.line,
                                    col: c.col,
                                });
                            }
                        }
                        goal.insert(parse_ground_atom(c, domain, &objects)?);
                    }
                }
            }
            other => return Err(section.err(format!("unknown section `{other}`"))),
        }
    }

    let found = domain_name.ok_or_else(|| top.err("problem is missing (:domain ...)"))?;
    if found != domain.name {
        return Err(ParseError::DomainMismatch {
            expected: domain.name.clone(),
            found,
        });
    }
    if !saw_objects || !saw_init || !saw_goal {
        return Err(top.err("problem needs :objects, :init and :goal sections"));
    }

    Ok(Problem {
        name,
        domain: found,
        objects,
        init,
        goal,
    })
}

// ---------------------------------------------------------------------------
// Views
// ---------------------------------------------------------------------------

/// An ordered stack of cumulative predicate keep-sets. Each view is a strict
/// superset of the one before it and the last view covers every predicate of
/// the domain. Views keep predicates in domain declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewSpec {
    views: Vec<IndexSet<String>>,
}

impl ViewSpec {
    /// Build a spec from raw keep-sets, validating monotonicity and final
    /// completeness and normalizing each view to declaration order.
    pub fn from_sets(sets: Vec<BTreeSet<String>>, domain: &Domain) -> Result<ViewSpec, ParseError> {
        let lines = vec![0usize; sets.len()];
        ViewSpec::from_sets_with_lines(sets, &lines, domain)
    }

    fn from_sets_with_lines(
        sets: Vec<BTreeSet<String>>,
        lines: &[usize],
        domain: &Domain,
    ) -> Result<ViewSpec, ParseError> {
        if sets.is_empty() {
            return Err(ParseError::EmptyViews);
        }
        let mut views: Vec<IndexSet<String>> = Vec::with_capacity(sets.len());
        for (i, set) in sets.iter().enumerate() {
            for pred in set {
                if !domain.predicates.contains_key(pred) {
                    return Err(ParseError::UnknownPredicate {
                        pred: pred.clone(),
                        line: lines[i],
                        col: 0,
                    });
                }
            }
            if i > 0 {
                let prev = &sets[i - 1];
                if !prev.is_subset(set) || prev.len() >= set.len() {
                    return Err(ParseError::NonMonotoneViews {
                        view: i + 1,
                        line: lines[i],
                    });
                }
            }
            // Normalize to declaration order.
            let ordered: IndexSet<String> = domain
                .predicates
                .keys()
                .filter(|p| set.contains(*p))
                .cloned()
                .collect();
            views.push(ordered);
        }
        let last = sets.last().unwrap();
        let missing: Vec<String> = domain
            .predicates
            .keys()
            .filter(|p| !last.contains(*p))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(ParseError::IncompleteFinalView { missing });
        }
        Ok(ViewSpec { views })
    }

    /// The trivial one-view spec covering the whole domain.
    pub fn single_full(domain: &Domain) -> ViewSpec {
        ViewSpec {
            views: vec![domain.predicates.keys().cloned().collect()],
        }
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    /// The keep-set of view `i` (0-based).
    pub fn view(&self, i: usize) -> &IndexSet<String> {
        &self.views[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &IndexSet<String>> {
        self.views.iter()
    }
}

pub fn parse_views(text: &str, domain: &Domain) -> Result<ViewSpec, ParseError> {
    let mut sets: Vec<BTreeSet<String>> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let set = if tokens.len() == 1 && looks_like_shorthand(tokens[0]) {
            let mut set = BTreeSet::new();
            for part in tokens[0].split('+') {
                let group = Group::from_symbol(part).ok_or(ParseError::UnknownGroup {
                    symbol: part.to_string(),
                    line: line_no,
                })?;
                set.extend(domain.group_members(group).iter().map(|s| s.to_string()));
            }
            set
        } else {
            let mut set = BTreeSet::new();
            for tok in tokens {
                if !domain.predicates.contains_key(tok) {
                    return Err(ParseError::UnknownPredicate {
                        pred: tok.to_string(),
                        line: line_no,
                        col: 0,
                    });
                }
                set.insert(tok.to_string());
            }
            set
        };
        sets.push(set);
        lines.push(line_no);
    }
    ViewSpec::from_sets_with_lines(sets, &lines, domain)
}

/// A lone token is group shorthand if it contains `+` or is itself a group
/// symbol. (A predicate named like a group symbol would need the explicit
/// multi-token form, which the serializer never produces for such domains.)
fn looks_like_shorthand(token: &str) -> bool {
    token.contains('+') || Group::from_symbol(token).is_some()
}

// ---------------------------------------------------------------------------
// Serializers
// ---------------------------------------------------------------------------

/// Variable names used when re-printing predicate declarations (predicate
/// parameter names are not semantically meaningful, only their types are).
const PRED_VAR_NAMES: [&str; 6] = ["x", "y", "z", "w", "v", "u"];

fn write_literal(out: &mut String, lit: &Literal) {
    let _ = write!(out, "({}", lit.pred);
    for t in &lit.args {
        let _ = write!(out, " {t}");
    }
    out.push(')');
}

pub fn serialize_domain(domain: &Domain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", domain.name);

    out.push_str("  (:types");
    for ty in &domain.types {
        let _ = write!(out, " {ty}");
    }
    out.push_str(")\n");

    out.push_str("  (:predicates\n");
    let n_preds = domain.predicates.len();
    for (i, p) in domain.predicates.values().enumerate() {
        let _ = write!(out, "    ({}", p.name);
        for (j, ty) in p.param_types.iter().enumerate() {
            let var = PRED_VAR_NAMES.get(j).copied().unwrap_or("a");
            let _ = write!(out, " ?{var} - {ty}");
        }
        out.push(')');
        out.push_str(if i + 1 == n_preds { ")\n" } else { "\n" });
    }

    out.push_str("  (:groups\n");
    for (i, group) in Group::ALL.iter().enumerate() {
        let _ = write!(out, "    ({}", group.keyword());
        for name in domain.group_members(*group) {
            let _ = write!(out, " {name}");
        }
        out.push(')');
        out.push_str(if i + 1 == Group::ALL.len() { ")\n" } else { "\n" });
    }

    // Families in order of first appearance; members in declaration order.
    let mut families: IndexMap<&str, Vec<&str>> = IndexMap::new();
    for p in domain.predicates.values() {
        families
            .entry(p.family.as_str())
            .or_default()
            .push(p.name.as_str());
    }
    out.push_str("  (:families\n");
    let n_fams = families.len();
    for (i, (fam, members)) in families.iter().enumerate() {
        let _ = write!(out, "    ({fam}");
        for m in members {
            let _ = write!(out, " {m}");
        }
        out.push(')');
        out.push_str(if i + 1 == n_fams { ")\n" } else { "\n" });
    }

    for action in domain.actions.values() {
        let _ = writeln!(out, "  (:action {}", action.name);
        out.push_str("    :parameters (");
        for (i, (p, ty)) in action.params.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "?{p} - {ty}");
        }
        out.push_str(")\n");
        out.push_str("    :precondition (and");
        for lit in &action.pre {
            out.push(' ');
            write_literal(&mut out, lit);
        }
        out.push_str(")\n");
        out.push_str("    :effect (and");
        for lit in &action.add {
            out.push(' ');
            write_literal(&mut out, lit);
        }
        for lit in &action.del {
            out.push_str(" (not ");
            write_literal(&mut out, lit);
            out.push(')');
        }
        out.push_str("))\n");
    }

    out.push_str(")\n");
    out
}

pub fn serialize_problem(problem: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", problem.name);
    let _ = writeln!(out, "  (:domain {})", problem.domain);

    // Objects: one line per type (types sorted), objects sorted within the
    // line. Objects with several types repeat across lines; the parser
    // unions the memberships back together.
    let mut by_type: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (obj, tys) in &problem.objects {
        for ty in tys {
            by_type.entry(ty.as_str()).or_default().push(obj.as_str());
        }
    }
    out.push_str("  (:objects\n");
    let n_types = by_type.len();
    for (i, (ty, mut objs)) in by_type.into_iter().enumerate() {
        objs.sort_unstable();
        out.push_str("    ");
        for obj in objs {
            let _ = write!(out, "{obj} ");
        }
        let _ = write!(out, "- {ty}");
        out.push_str(if i + 1 == n_types { ")\n" } else { "\n" });
    }

    out.push_str("  (:init\n");
    let n_init = problem.init.len();
    for (i, atom) in problem.init.iter().enumerate() {
        let _ = write!(out, "    {atom}");
        out.push_str(if i + 1 == n_init { ")\n" } else { "\n" });
    }

    if problem.goal.is_empty() {
        out.push_str("  (:goal (and)))\n");
    } else {
        out.push_str("  (:goal (and\n");
        let n_goal = problem.goal.len();
        for (i, atom) in problem.goal.iter().enumerate() {
            let _ = write!(out, "    {atom}");
            out.push_str(if i + 1 == n_goal { ")))\n" } else { "\n" });
        }
    }
    out
}

pub fn serialize_views(spec: &ViewSpec, domain: &Domain) -> String {
    let mut out = String::new();
    for view in spec.iter() {
        let as_set: BTreeSet<&str> = view.iter().map(|s| s.as_str()).collect();
        // Greedy group shorthand: take every group fully contained in the
        // view; if together they cover it exactly, print symbols.
        let mut covered: BTreeSet<&str> = BTreeSet::new();
        let mut symbols: Vec<&str> = Vec::new();
        for group in Group::ALL {
            let members = domain.group_members(group);
            if !members.is_empty() && members.iter().all(|m| as_set.contains(m)) {
                symbols.push(group.symbol());
                covered.extend(members);
            }
        }
        if covered == as_set && !symbols.is_empty() {
            let _ = writeln!(out, "{}", symbols.join("+"));
        } else {
            let names: Vec<&str> = view.iter().map(|s| s.as_str()).collect();
            let _ = writeln!(out, "{}", names.join(" "));
        }
    }
    out
}
