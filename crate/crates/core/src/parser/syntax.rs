use std::collections::BTreeSet;

use super::lexer::{lex, Pos, Tok};
use super::ParseError;
use crate::kernel::{CtorSig, DataDecl, TypeExpr};

/// Surface expressions: closed terms, or function-table right-hand
/// sides that may mention pattern variables.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var(String),
    Bool(bool),
    Unit,
    Pair(Box<Expr>, Box<Expr>),
    Con {
        ctor: String,
        type_args: Vec<TypeExpr>,
        args: Vec<Expr>,
    },
    Not(Box<Expr>),
    Fst(Box<Expr>),
    Snd(Box<Expr>),
    Fun(FunLit),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    Wild,
    Var(String),
    Bool(bool),
    Unit,
    Pair(Box<Pattern>, Box<Pattern>),
    Lit(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunLit {
    pub dom: TypeExpr,
    pub cod: TypeExpr,
    pub rows: Vec<(Pattern, Expr)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RelBody {
    All,
    None,
    Eq,
    AllExcept(Vec<Expr>),
    Pairs(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelLit {
    pub src: TypeExpr,
    pub tgt: TypeExpr,
    pub body: RelBody,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Decl(DataDecl),
    Term { name: String, expr: Expr },
    Rel { name: String, rel: RelLit },
    Fun { name: String, fun: FunLit },
}

const KEYWORDS: &[&str] = &[
    "data", "where", "Set", "Bool", "Unit", "true", "false", "unit", "fun", "rel", "term", "not",
    "fst", "snd", "all", "none", "eq", "except",
];

pub(crate) struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, i: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(self.pos(), msg.into()))
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("a name"),
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    /// An item keyword followed by a name and `=` begins a new item.
    fn at_item_start(&self) -> bool {
        match self.peek() {
            Tok::Ident(k) if k == "data" => true,
            Tok::Ident(k) if k == "term" || k == "rel" || k == "fun" => {
                matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Equals
            }
            _ => false,
        }
    }

    pub(crate) fn items(&mut self) -> Result<Vec<Item>, ParseError> {
        let mut items = Vec::new();
        let mut seen = BTreeSet::new();
        while !self.at_eof() {
            let start = self.pos();
            let item = if self.is_kw("data") {
                Item::Decl(self.decl()?)
            } else if self.is_kw("term") {
                self.bump();
                let name = self.name()?;
                self.expect(Tok::Equals)?;
                Item::Term { name, expr: self.expr()? }
            } else if self.is_kw("rel") {
                self.bump();
                let name = self.name()?;
                self.expect(Tok::Equals)?;
                Item::Rel { name, rel: self.rel_lit()? }
            } else if self.is_kw("fun") {
                self.bump();
                let name = self.name()?;
                self.expect(Tok::Equals)?;
                Item::Fun { name, fun: self.fun_lit()? }
            } else {
                return self.unexpected("`data`, `term`, `rel` or `fun`");
            };
            let (kind, name) = match &item {
                Item::Decl(d) => ("declaration", &d.name),
                Item::Term { name, .. } => ("value", name),
                Item::Rel { name, .. } => ("relation", name),
                Item::Fun { name, .. } => ("value", name),
            };
            if !seen.insert((kind, name.clone())) {
                return Err(ParseError::new(start, format!("duplicate {kind} `{name}`")));
            }
            items.push(item);
        }
        let names: BTreeSet<String> = items
            .iter()
            .filter_map(|i| match i {
                Item::Decl(d) => Some(d.name.clone()),
                _ => None,
            })
            .collect();
        for item in &mut items {
            resolve_item(item, &names);
        }
        Ok(items)
    }

    fn decl(&mut self) -> Result<DataDecl, ParseError> {
        self.expect_kw("data")?;
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        self.expect_kw("Set")?;
        let mut arity = 0;
        while *self.peek() == Tok::Arrow {
            self.bump();
            self.expect_kw("Set")?;
            arity += 1;
        }
        if arity == 0 {
            return self.unexpected("`→ Set`");
        }
        self.expect_kw("where")?;
        let mut ctors = Vec::new();
        while matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
            && *self.peek_at(1) == Tok::Colon
        {
            ctors.push(self.ctor(&name)?);
        }
        Ok(DataDecl { name, arity, ctors })
    }

    fn ctor(&mut self, decl: &str) -> Result<CtorSig, ParseError> {
        let pos = self.pos();
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        let mut quantified = Vec::new();
        if *self.peek() == Tok::Forall {
            self.bump();
            self.expect(Tok::LBrace)?;
            while *self.peek() != Tok::RBrace {
                quantified.push(self.name()?);
            }
            self.bump();
            self.expect(Tok::Arrow)?;
        }
        let mut spine = vec![self.ty_prod()?];
        while *self.peek() == Tok::Arrow {
            self.bump();
            spine.push(self.ty_prod()?);
        }
        let ret = spine.pop().expect("spine is non-empty");
        match ret {
            TypeExpr::App(con, ret_instance) if con == decl => Ok(CtorSig {
                name,
                quantified,
                args: spine,
                ret_instance,
            }),
            TypeExpr::Var(v) if v == decl => Ok(CtorSig {
                name,
                quantified,
                args: spine,
                ret_instance: Vec::new(),
            }),
            _ => Err(ParseError::new(
                pos,
                format!("constructor `{name}` must return an instance of `{decl}`"),
            )),
        }
    }

    pub(crate) fn ty(&mut self) -> Result<TypeExpr, ParseError> {
        let dom = self.ty_prod()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(TypeExpr::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn ty_prod(&mut self) -> Result<TypeExpr, ParseError> {
        let left = self.ty_app()?;
        if *self.peek() == Tok::Times {
            self.bump();
            Ok(TypeExpr::prod(left, self.ty_prod()?))
        } else {
            Ok(left)
        }
    }

    fn ty_atom_start(&self) -> bool {
        match self.peek() {
            Tok::LParen => true,
            Tok::Ident(s) => {
                (s == "Bool" || s == "Unit" || !KEYWORDS.contains(&s.as_str()))
                    && *self.peek_at(1) != Tok::Colon
            }
            _ => false,
        }
    }

    fn ty_app(&mut self) -> Result<TypeExpr, ParseError> {
        if let Tok::Ident(s) = self.peek().clone() {
            if s != "Bool" && s != "Unit" && !KEYWORDS.contains(&s.as_str()) {
                self.bump();
                let mut args = Vec::new();
                while self.ty_atom_start() {
                    args.push(self.ty_atom()?);
                }
                return Ok(if args.is_empty() { TypeExpr::Var(s) } else { TypeExpr::App(s, args) });
            }
        }
        self.ty_atom()
    }

    fn ty_atom(&mut self) -> Result<TypeExpr, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) if s == "Bool" => {
                self.bump();
                Ok(TypeExpr::Bool)
            }
            Tok::Ident(s) if s == "Unit" => {
                self.bump();
                Ok(TypeExpr::Unit)
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(TypeExpr::Var(s))
            }
            _ => self.unexpected("a type"),
        }
    }

    fn type_args(&mut self) -> Result<Vec<TypeExpr>, ParseError> {
        self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RBracket {
            out.push(self.ty()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                out.push(self.ty()?);
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(out)
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "not" || s == "fst" || s == "snd" => {
                self.bump();
                let inner = Box::new(self.aexpr()?);
                Ok(match s.as_str() {
                    "not" => Expr::Not(inner),
                    "fst" => Expr::Fst(inner),
                    _ => Expr::Snd(inner),
                })
            }
            Tok::Ident(s)
                if !KEYWORDS.contains(&s.as_str()) && *self.peek_at(1) == Tok::LBracket =>
            {
                self.bump();
                let type_args = self.type_args()?;
                let mut args = Vec::new();
                while self.aexpr_start() {
                    args.push(self.aexpr()?);
                }
                Ok(Expr::Con { ctor: s, type_args, args })
            }
            _ => self.aexpr(),
        }
    }

    fn aexpr_start(&self) -> bool {
        match self.peek() {
            Tok::LParen => true,
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" | "unit" => true,
                "fun" => !self.at_item_start(),
                _ => !KEYWORDS.contains(&s.as_str()) && *self.peek_at(1) != Tok::Colon,
            },
            _ => false,
        }
    }

    fn aexpr(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let first = self.expr()?;
                let e = if *self.peek() == Tok::Comma {
                    self.bump();
                    Expr::Pair(Box::new(first), Box::new(self.expr()?))
                } else {
                    first
                };
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::Bool(s == "true"))
                }
                "unit" => {
                    self.bump();
                    Ok(Expr::Unit)
                }
                "fun" => Ok(Expr::Fun(self.fun_lit()?)),
                _ if KEYWORDS.contains(&s.as_str()) => self.unexpected("a term"),
                _ => {
                    self.bump();
                    if *self.peek() == Tok::LBracket {
                        let type_args = self.type_args()?;
                        Ok(Expr::Con { ctor: s, type_args, args: Vec::new() })
                    } else {
                        Ok(Expr::Var(s))
                    }
                }
            },
            _ => self.unexpected("a term"),
        }
    }

    pub(crate) fn fun_lit(&mut self) -> Result<FunLit, ParseError> {
        let pos = self.pos();
        self.expect_kw("fun")?;
        let (dom, cod) = match self.ty()? {
            TypeExpr::Arrow(d, c) => (*d, *c),
            other => {
                return Err(ParseError::new(pos, format!("function literal needs an arrow type, found {other}")))
            }
        };
        self.expect(Tok::LBrace)?;
        let mut rows = Vec::new();
        while *self.peek() != Tok::RBrace {
            let pat = self.pattern()?;
            self.expect(Tok::FatArrow)?;
            rows.push((pat, self.expr()?));
            if *self.peek() == Tok::Comma {
                self.bump();
            } else if *self.peek() != Tok::RBrace {
                return self.unexpected("`,` or `}`");
            }
        }
        self.bump();
        Ok(FunLit { dom, cod, rows })
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        match self.peek().clone() {
            Tok::Underscore => {
                self.bump();
                Ok(Pattern::Wild)
            }
            Tok::LParen => {
                self.bump();
                let first = self.pattern()?;
                let p = if *self.peek() == Tok::Comma {
                    self.bump();
                    Pattern::Pair(Box::new(first), Box::new(self.pattern()?))
                } else {
                    first
                };
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Pattern::Bool(s == "true"))
            }
            Tok::Ident(s) if s == "unit" => {
                self.bump();
                Ok(Pattern::Unit)
            }
            Tok::Ident(s) if s == "fun" || *self.peek_at(1) == Tok::LBracket => {
                Ok(Pattern::Lit(self.expr()?))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Pattern::Var(s))
            }
            _ => self.unexpected("a pattern"),
        }
    }

    pub(crate) fn rel_lit(&mut self) -> Result<RelLit, ParseError> {
        self.expect_kw("rel")?;
        let src = self.ty_atom()?;
        let tgt = self.ty_atom()?;
        self.expect(Tok::LBrace)?;
        let body = if self.is_kw("all") {
            self.bump();
            if self.is_kw("except") {
                self.bump();
                RelBody::AllExcept(self.pair_list()?)
            } else {
                RelBody::All
            }
        } else if self.is_kw("none") {
            self.bump();
            RelBody::None
        } else if self.is_kw("eq") {
            self.bump();
            RelBody::Eq
        } else {
            RelBody::Pairs(self.pair_list()?)
        };
        self.expect(Tok::RBrace)?;
        Ok(RelLit { src, tgt, body })
    }

    fn pair_list(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::RBrace {
            let pos = self.pos();
            let e = self.aexpr()?;
            if !matches!(e, Expr::Pair(..)) {
                return Err(ParseError::new(pos, "relation entries must be pairs `(left, right)`"));
            }
            out.push(e);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else if *self.peek() != Tok::RBrace {
                return self.unexpected("`,` or `}`");
            }
        }
        Ok(out)
    }
}

pub(crate) fn resolve_type(ty: &TypeExpr, names: &BTreeSet<String>) -> TypeExpr {
    match ty {
        TypeExpr::Var(v) if names.contains(v) => TypeExpr::App(v.clone(), Vec::new()),
        TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => ty.clone(),
        TypeExpr::Prod(l, r) => TypeExpr::prod(resolve_type(l, names), resolve_type(r, names)),
        TypeExpr::Arrow(l, r) => TypeExpr::arrow(resolve_type(l, names), resolve_type(r, names)),
        TypeExpr::App(c, args) => {
            TypeExpr::App(c.clone(), args.iter().map(|a| resolve_type(a, names)).collect())
        }
    }
}

pub(crate) fn resolve_expr(e: &mut Expr, names: &BTreeSet<String>) {
    match e {
        Expr::Var(_) | Expr::Bool(_) | Expr::Unit => {}
        Expr::Pair(l, r) => {
            resolve_expr(l, names);
            resolve_expr(r, names);
        }
        Expr::Con { type_args, args, .. } => {
            type_args.iter_mut().for_each(|t| *t = resolve_type(t, names));
            args.iter_mut().for_each(|a| resolve_expr(a, names));
        }
        Expr::Not(x) | Expr::Fst(x) | Expr::Snd(x) => resolve_expr(x, names),
        Expr::Fun(f) => resolve_fun(f, names),
    }
}

pub(crate) fn resolve_fun(f: &mut FunLit, names: &BTreeSet<String>) {
    f.dom = resolve_type(&f.dom, names);
    f.cod = resolve_type(&f.cod, names);
    for (p, e) in &mut f.rows {
        resolve_pattern(p, names);
        resolve_expr(e, names);
    }
}

fn resolve_pattern(p: &mut Pattern, names: &BTreeSet<String>) {
    match p {
        Pattern::Pair(l, r) => {
            resolve_pattern(l, names);
            resolve_pattern(r, names);
        }
        Pattern::Lit(e) => resolve_expr(e, names),
        _ => {}
    }
}

pub(crate) fn resolve_rel(r: &mut RelLit, names: &BTreeSet<String>) {
    r.src = resolve_type(&r.src, names);
    r.tgt = resolve_type(&r.tgt, names);
    if let RelBody::AllExcept(es) | RelBody::Pairs(es) = &mut r.body {
        es.iter_mut().for_each(|e| resolve_expr(e, names));
    }
}

fn resolve_item(item: &mut Item, names: &BTreeSet<String>) {
    match item {
        Item::Decl(d) => {
            for c in &mut d.ctors {
                c.args = c.args.iter().map(|t| resolve_type(t, names)).collect();
                c.ret_instance = c.ret_instance.iter().map(|t| resolve_type(t, names)).collect();
            }
        }
        Item::Term { expr, .. } => resolve_expr(expr, names),
        Item::Rel { rel, .. } => resolve_rel(rel, names),
        Item::Fun { fun, .. } => resolve_fun(fun, names),
    }
}
