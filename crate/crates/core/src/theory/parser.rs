//! Recursive-descent parser producing unresolved syntax.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use super::diag::Diagnostic;
use super::lexer::{is_keyword, tokenize, Punct, TokKind, Token};
use super::syntax::*;
use crate::model::{parse_decimal, BinaryOp, Quantifier, Span, UnaryOp};

type PResult<T> = Result<T, Diagnostic>;

const ITEM_KEYWORDS: &[&str] = &[
    "domain",
    "fluent",
    "action",
    "successor",
    "effects",
    "init",
    "program",
];

const STEP_KEYWORDS: &[&str] = &["actual", "observe", "exec", "query", "assert"];

pub fn parse_items(src: &str) -> PResult<Vec<Item>> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    loop {
        while p.eat_punct(Punct::Semi) {}
        if p.at_eof() {
            return Ok(items);
        }
        items.push(p.item()?);
    }
}

pub fn parse_steps(src: &str) -> PResult<Vec<(Span, RawStep)>> {
    let mut p = Parser::new(src)?;
    let mut steps = Vec::new();
    loop {
        while p.eat_punct(Punct::Semi) {}
        if p.at_eof() {
            return Ok(steps);
        }
        let span = p.span();
        steps.push((span, p.step()?));
    }
}

/// Parses a standalone expression (used by tests and the CLI).
pub fn parse_expr_text(src: &str) -> PResult<RawExpr> {
    let mut p = Parser::new(src)?;
    let e = p.expr(0)?;
    if !p.at_eof() {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &TokKind {
        &self.toks[self.pos].kind
    }

    fn peek_at(&self, k: usize) -> &TokKind {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].kind
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), TokKind::Eof)
    }

    fn at_punct(&self, p: Punct) -> bool {
        matches!(self.peek(), TokKind::Punct(q) if *q == p)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), TokKind::Ident(s) if s == kw)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::error(
            self.span(),
            format!("expected {wanted}, found {}", self.peek()),
        )
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<Span> {
        if self.at_punct(p) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{}`", p.text())))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// A non-keyword identifier.
    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            TokKind::Ident(text) if !is_keyword(&text) => {
                let span = self.bump().span;
                Ok(Ident { text, span })
            }
            TokKind::Ident(text) => Err(Diagnostic::error(
                self.span(),
                format!("expected {what}, found keyword `{text}`"),
            )),
            _ => Err(self.unexpected(what)),
        }
    }

    fn comma_list<T>(
        &mut self,
        close: Punct,
        mut f: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.eat_punct(close) {
            return Ok(out);
        }
        loop {
            out.push(f(self)?);
            if self.eat_punct(close) {
                return Ok(out);
            }
            self.expect_punct(Punct::Comma)?;
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = self.eat_punct(Punct::Minus);
        let span = self.span();
        match self.peek().clone() {
            TokKind::Number(text) => {
                self.bump();
                let v: i64 = text
                    .parse()
                    .map_err(|_| Diagnostic::error(span, format!("`{text}` is not an integer")))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    // ---- items ----

    fn item(&mut self) -> PResult<Item> {
        let kw = match self.peek() {
            TokKind::Ident(s) if ITEM_KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => {
                return Err(self.unexpected(
                    "a declaration (domain, fluent, action, successor, effects, init, program)",
                ))
            }
        };
        self.bump();
        match kw.as_str() {
            "domain" => self.domain_item(),
            "fluent" => self.fluent_item(),
            "action" => self.action_item(),
            "successor" => self.successor_item(),
            "effects" => self.effects_item(),
            "init" => self.init_item(),
            _ => self.program_item(),
        }
    }

    fn domain_item(&mut self) -> PResult<Item> {
        let name = self.ident("a domain name")?;
        self.expect_punct(Punct::Eq)?;
        let def = if self.eat_punct(Punct::LBrace) {
            DomainDef::Symbols(self.comma_list(Punct::RBrace, |p| p.ident("a symbol"))?)
        } else {
            let lo = self.signed_int()?;
            self.expect_punct(Punct::DotDot)?;
            let hi = self.signed_int()?;
            DomainDef::Range(lo, hi)
        };
        Ok(Item::Domain { name, def })
    }

    fn typed_params(&mut self) -> PResult<Vec<(Ident, Ident)>> {
        if !self.eat_punct(Punct::LParen) {
            return Ok(Vec::new());
        }
        self.comma_list(Punct::RParen, |p| {
            let name = p.ident("a parameter name")?;
            p.expect_punct(Punct::Colon)?;
            let dom = p.domain_name()?;
            Ok((name, dom))
        })
    }

    fn domain_name(&mut self) -> PResult<Ident> {
        self.ident("a domain name")
    }

    fn fluent_item(&mut self) -> PResult<Item> {
        let name = self.ident("a fluent name")?;
        let params = self.typed_params()?;
        self.expect_punct(Punct::Colon)?;
        let range = self.domain_name()?;
        Ok(Item::Fluent {
            name,
            params,
            range,
        })
    }

    fn action_item(&mut self) -> PResult<Item> {
        let name = self.ident("an action name")?;
        let mut params = Vec::new();
        if self.eat_punct(Punct::LParen) {
            params = self.comma_list(Punct::RParen, |p| {
                let mode = if p.eat_kw("actual") {
                    Mode::Actual
                } else {
                    p.eat_kw("nominal");
                    Mode::Nominal
                };
                let name = p.ident("a parameter name")?;
                p.expect_punct(Punct::Colon)?;
                let domain = p.domain_name()?;
                Ok(RawParam { mode, name, domain })
            })?;
        }
        let (mut poss, mut observe, mut likelihood) = (None, None, None);
        loop {
            let span = self.span();
            if self.eat_kw("poss") {
                self.expect_punct(Punct::Colon)?;
                if poss.replace(self.expr(0)?).is_some() {
                    return Err(Diagnostic::error(span, "duplicate `poss` clause"));
                }
            } else if self.eat_kw("observe") {
                self.expect_punct(Punct::Colon)?;
                self.expect_punct(Punct::LParen)?;
                let group = self.ident("an observation group")?;
                let mut visible = Vec::new();
                while self.eat_punct(Punct::Comma) {
                    visible.push(self.ident("a parameter name")?);
                }
                self.expect_punct(Punct::RParen)?;
                if observe.replace((group, visible)).is_some() {
                    return Err(Diagnostic::error(span, "duplicate `observe` clause"));
                }
            } else if self.eat_kw("likelihood") {
                self.expect_punct(Punct::Colon)?;
                if likelihood.replace(self.expr(0)?).is_some() {
                    return Err(Diagnostic::error(span, "duplicate `likelihood` clause"));
                }
            } else {
                break;
            }
        }
        Ok(Item::Action {
            name,
            params,
            poss,
            observe,
            likelihood,
        })
    }

    fn pattern(&mut self) -> PResult<RawPattern> {
        let span = self.span();
        if self.at_kw("_") {
            self.bump();
            return Ok(RawPattern {
                schema: None,
                args: Vec::new(),
                span,
            });
        }
        let schema = self.ident("an action name or `_`")?;
        let args = if self.eat_punct(Punct::LParen) {
            self.comma_list(Punct::RParen, |p| p.pat_arg())?
        } else {
            Vec::new()
        };
        Ok(RawPattern {
            schema: Some(schema),
            args,
            span,
        })
    }

    fn pat_arg(&mut self) -> PResult<RawPatArg> {
        match self.peek().clone() {
            TokKind::Ident(s) if s == "_" => Ok(RawPatArg::Wild(self.bump().span)),
            TokKind::Ident(s) if s == "true" || s == "false" => Ok(RawPatArg::Lit(self.expr(7)?)),
            TokKind::Ident(_) => Ok(RawPatArg::Name(self.ident("a variable")?)),
            _ => Ok(RawPatArg::Lit(self.expr(7)?)),
        }
    }

    fn successor_item(&mut self) -> PResult<Item> {
        let fluent = self.ident("a fluent name")?;
        let params = if self.eat_punct(Punct::LParen) {
            self.comma_list(Punct::RParen, |p| p.ident("a parameter name"))?
        } else {
            Vec::new()
        };
        self.expect_punct(Punct::LBrace)?;
        let mut cases = Vec::new();
        loop {
            while self.eat_punct(Punct::Semi) {}
            if self.eat_punct(Punct::RBrace) {
                break;
            }
            self.expect_kw("case")?;
            let pattern = self.pattern()?;
            let guard = if self.eat_kw("when") {
                Some(self.expr(0)?)
            } else {
                None
            };
            self.expect_punct(Punct::FatArrow)?;
            let value = self.expr(0)?;
            cases.push(RawCase {
                pattern,
                guard,
                value,
            });
        }
        Ok(Item::Successor {
            fluent,
            params,
            cases,
        })
    }

    fn effects_item(&mut self) -> PResult<Item> {
        self.expect_punct(Punct::LBrace)?;
        let mut clauses = Vec::new();
        loop {
            while self.eat_punct(Punct::Semi) {}
            if self.eat_punct(Punct::RBrace) {
                break;
            }
            let pattern = self.pattern()?;
            self.expect_kw("causes")?;
            let negated = self.eat_kw("not");
            let fluent = self.ident("a fluent name")?;
            let args = if self.eat_punct(Punct::LParen) {
                self.comma_list(Punct::RParen, |p| p.pat_arg())?
            } else {
                Vec::new()
            };
            let assign = if self.eat_punct(Punct::Assign) {
                if negated {
                    return Err(Diagnostic::error(
                        fluent.span,
                        "`causes not` cannot assign a value",
                    ));
                }
                Some(self.expr(0)?)
            } else {
                None
            };
            let guard = if self.eat_kw("when") {
                Some(self.expr(0)?)
            } else {
                None
            };
            clauses.push(RawClause {
                pattern,
                negated,
                fluent,
                args,
                assign,
                guard,
            });
        }
        Ok(Item::Effects(clauses))
    }

    fn assignments(&mut self) -> PResult<Vec<RawAssign>> {
        self.expect_punct(Punct::LBrace)?;
        self.comma_list(Punct::RBrace, |p| {
            let fluent = p.ident("a fluent name")?;
            let args = if p.eat_punct(Punct::LParen) {
                p.comma_list(Punct::RParen, |q| q.expr(0))?
            } else {
                Vec::new()
            };
            p.expect_punct(Punct::Eq)?;
            let value = p.expr(0)?;
            Ok(RawAssign {
                fluent,
                args,
                value,
            })
        })
    }

    fn init_item(&mut self) -> PResult<Item> {
        self.expect_punct(Punct::LBrace)?;
        let mut worlds = Vec::new();
        loop {
            while self.eat_punct(Punct::Semi) {}
            if self.eat_punct(Punct::RBrace) {
                break;
            }
            let span = self.expect_kw("world")?;
            let assigns = self.assignments()?;
            let weight = if self.eat_kw("weight") {
                Some(self.expr(0)?)
            } else {
                None
            };
            worlds.push(RawWorld {
                span,
                assigns,
                weight,
            });
        }
        Ok(Item::Init(worlds))
    }

    fn program_item(&mut self) -> PResult<Item> {
        let name = self.ident("a program name")?;
        let params = self.typed_params()?;
        self.expect_punct(Punct::Eq)?;
        let body = self.program(true)?;
        Ok(Item::Program { name, params, body })
    }

    // ---- programs ----

    fn program(&mut self, allow_seq: bool) -> PResult<RawProgram> {
        let mut left = self.program_seq(allow_seq)?;
        while self.eat_punct(Punct::Bar) {
            let right = self.program_seq(allow_seq)?;
            left = RawProgram::Choice(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn program_seq(&mut self, allow_seq: bool) -> PResult<RawProgram> {
        let mut left = self.program_atom(allow_seq)?;
        while allow_seq && self.at_punct(Punct::Semi) && self.program_starts_at(1) {
            self.bump();
            let right = self.program_atom(allow_seq)?;
            left = RawProgram::Seq(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn program_starts_at(&self, k: usize) -> bool {
        match self.peek_at(k) {
            TokKind::Punct(Punct::LParen) => true,
            TokKind::Ident(s) => s == "pi" || !is_keyword(s),
            _ => false,
        }
    }

    fn program_atom(&mut self, allow_seq: bool) -> PResult<RawProgram> {
        if self.eat_punct(Punct::LParen) {
            let p = self.program(true)?;
            self.expect_punct(Punct::RParen)?;
            return Ok(p);
        }
        if self.eat_kw("pi") {
            let var = self.ident("a variable")?;
            self.expect_punct(Punct::Colon)?;
            let domain = self.domain_name()?;
            self.expect_punct(Punct::Dot)?;
            let body = self.program(allow_seq)?;
            return Ok(RawProgram::Pi {
                var,
                domain,
                body: Box::new(body),
            });
        }
        let name = self.ident("an action or program name")?;
        let args = if self.eat_punct(Punct::LParen) {
            Some(self.comma_list(Punct::RParen, |p| {
                if matches!(p.peek(), TokKind::Ident(s) if s == "_") {
                    p.bump();
                    Ok(None)
                } else {
                    p.expr(0).map(Some)
                }
            })?)
        } else {
            None
        };
        Ok(RawProgram::Call { name, args })
    }

    // ---- scenario steps ----

    fn step(&mut self) -> PResult<RawStep> {
        let kw = match self.peek() {
            TokKind::Ident(s) if STEP_KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return Err(self.unexpected("a step (actual, observe, exec, query, assert)")),
        };
        self.bump();
        match kw.as_str() {
            "actual" => Ok(RawStep::Actual(self.assignments()?)),
            "observe" => {
                let group = self.ident("an observation group")?;
                let args = if self.eat_punct(Punct::LParen) {
                    self.comma_list(Punct::RParen, |p| p.expr(0))?
                } else {
                    Vec::new()
                };
                Ok(RawStep::Observe { group, args })
            }
            "exec" => Ok(RawStep::Exec(self.program(false)?)),
            "query" => {
                let kind = if self.eat_kw("bel") {
                    QueryKind::Bel
                } else if self.eat_kw("know") {
                    QueryKind::Know
                } else {
                    return Err(self.unexpected("`bel` or `know`"));
                };
                Ok(RawStep::Query {
                    kind,
                    formula: self.expr(0)?,
                })
            }
            _ => {
                let op = match self.peek() {
                    TokKind::Punct(p) => comparison(*p),
                    _ => None,
                }
                .ok_or_else(|| self.unexpected("a comparison operator"))?;
                self.bump();
                let value = self.expr(0)?;
                let tolerance = if self.eat_kw("within") {
                    Some(self.expr(0)?)
                } else {
                    None
                };
                Ok(RawStep::Assert {
                    op,
                    value,
                    tolerance,
                })
            }
        }
    }

    // ---- expressions ----

    fn expr(&mut self, min_prec: u8) -> PResult<RawExpr> {
        let span = self.span();
        let mut left = if self.eat_kw("not") {
            let e = self.expr(5)?;
            RawExpr {
                kind: RawExprKind::Unary(UnaryOp::Not, Box::new(e)),
                span,
            }
        } else if self.eat_punct(Punct::Minus) {
            let e = self.expr(9)?;
            RawExpr {
                kind: RawExprKind::Unary(UnaryOp::Neg, Box::new(e)),
                span,
            }
        } else if self.eat_kw("if") {
            let c = self.expr(0)?;
            self.expect_kw("then")?;
            let t = self.expr(0)?;
            self.expect_kw("else")?;
            let e = self.expr(0)?;
            return Ok(RawExpr {
                kind: RawExprKind::If(Box::new(c), Box::new(t), Box::new(e)),
                span,
            });
        } else if self.at_kw("forall") || self.at_kw("exists") {
            let quantifier = if self.eat_kw("forall") {
                Quantifier::Forall
            } else {
                self.bump();
                Quantifier::Exists
            };
            let var = self.ident("a variable")?;
            self.expect_punct(Punct::Colon)?;
            let domain = self.domain_name()?;
            self.expect_punct(Punct::Dot)?;
            let body = self.expr(0)?;
            return Ok(RawExpr {
                kind: RawExprKind::Quant {
                    quantifier,
                    var,
                    domain,
                    body: Box::new(body),
                },
                span,
            });
        } else {
            self.primary()?
        };

        loop {
            let op_span = self.span();
            if self.at_kw("in") && min_prec <= 6 {
                self.bump();
                self.expect_punct(Punct::LBracket)?;
                let lo = self.expr(7)?;
                self.expect_punct(Punct::Comma)?;
                let hi = self.expr(7)?;
                self.expect_punct(Punct::RBracket)?;
                left = RawExpr {
                    kind: RawExprKind::InRange {
                        value: Box::new(left),
                        lo: Box::new(lo),
                        hi: Box::new(hi),
                    },
                    span,
                };
                self.reject_chain()?;
                continue;
            }
            let op = match self.peek() {
                TokKind::Punct(p) => binary_punct(*p),
                TokKind::Ident(s) => binary_word(s),
                _ => None,
            };
            let Some(op) = op else { break };
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs_min = match op {
                BinaryOp::Implies => prec,
                _ => prec + 1,
            };
            let right = self.expr(rhs_min)?;
            left = RawExpr {
                kind: RawExprKind::Binary(op, Box::new(left), Box::new(right)),
                span: op_span,
            };
            if prec == 6 {
                self.reject_chain()?;
            }
        }
        Ok(left)
    }

    fn reject_chain(&self) -> PResult<()> {
        let chained = self.at_kw("in")
            || matches!(self.peek(), TokKind::Punct(p) if comparison(*p).is_some());
        if chained {
            Err(Diagnostic::error(
                self.span(),
                "comparisons do not chain; add parentheses",
            ))
        } else {
            Ok(())
        }
    }

    fn primary(&mut self) -> PResult<RawExpr> {
        let span = self.span();
        let kind = match self.peek().clone() {
            TokKind::Number(text) => {
                self.bump();
                let r = parse_decimal(&text)
                    .ok_or_else(|| Diagnostic::error(span, format!("bad number `{text}`")))?;
                RawExprKind::Num(r)
            }
            TokKind::Punct(Punct::LParen) => {
                self.bump();
                let e = self.expr(0)?;
                self.expect_punct(Punct::RParen)?;
                return Ok(e);
            }
            TokKind::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                RawExprKind::Bool(s == "true")
            }
            TokKind::Ident(s) if s == "now" => {
                self.bump();
                RawExprKind::Now
            }
            TokKind::Ident(s) if s == "prev" => {
                self.bump();
                self.expect_punct(Punct::LParen)?;
                let inner = self.expr(0)?;
                self.expect_punct(Punct::RParen)?;
                RawExprKind::Prev(Box::new(inner))
            }
            TokKind::Ident(_) => {
                let name = self.ident("an expression")?;
                if self.eat_punct(Punct::LParen) {
                    let args = self.comma_list(Punct::RParen, |p| p.expr(0))?;
                    RawExprKind::App { name, args }
                } else {
                    RawExprKind::Name(name.text)
                }
            }
            _ => return Err(self.unexpected("an expression")),
        };
        Ok(RawExpr { kind, span })
    }
}

fn comparison(p: Punct) -> Option<BinaryOp> {
    Some(match p {
        Punct::Eq => BinaryOp::Eq,
        Punct::Ne => BinaryOp::Ne,
        Punct::Lt => BinaryOp::Lt,
        Punct::Le => BinaryOp::Le,
        Punct::Gt => BinaryOp::Gt,
        Punct::Ge => BinaryOp::Ge,
        _ => return None,
    })
}

fn binary_punct(p: Punct) -> Option<BinaryOp> {
    Some(match p {
        Punct::Plus => BinaryOp::Add,
        Punct::Minus => BinaryOp::Sub,
        Punct::Star => BinaryOp::Mul,
        Punct::Slash => BinaryOp::Div,
        _ => return comparison(p),
    })
}

fn binary_word(s: &str) -> Option<BinaryOp> {
    Some(match s {
        "and" => BinaryOp::And,
        "or" => BinaryOp::Or,
        "implies" => BinaryOp::Implies,
        "iff" => BinaryOp::Iff,
        _ => return None,
    })
}
