//! Recursive-descent parser for the scene language.
//!
//! The syntax is line-oriented: statements end at a newline or `;`, and
//! `#` starts a comment running to the end of the line. The full grammar
//! is documented in `docs/grammar.md`.

use super::ast::*;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: u32, column: u32, message: String },
    #[error("{line}:{column}: duplicate identifier {id}")]
    DuplicateIdentifier { line: u32, column: u32, id: char },
    #[error("{line}:{column}: unknown constructor {name:?}")]
    UnknownConstructor { line: u32, column: u32, name: String },
    #[error("{line}:{column}: unknown constraint {name:?}")]
    UnknownConstraint { line: u32, column: u32, name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),    // lowercase keyword or constructor/constraint name
    Letters(String), // run of uppercase letters: point/element reference
    Number(f64),
    Str(String),
    LParen,
    RParen,
    Comma,
    Equals,
    End, // statement terminator (newline or ;)
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: u32,
    column: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();

    macro_rules! push {
        ($t:expr, $c:expr) => {
            out.push(Spanned { tok: $t, line, column: $c })
        };
    }

    while let Some(&c) = chars.peek() {
        let start_col = col;
        match c {
            '\n' => {
                push!(Tok::End, start_col);
                chars.next();
                line += 1;
                col = 1;
            }
            ';' => {
                push!(Tok::End, start_col);
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '(' => {
                push!(Tok::LParen, start_col);
                chars.next();
                col += 1;
            }
            ')' => {
                push!(Tok::RParen, start_col);
                chars.next();
                col += 1;
            }
            ',' => {
                push!(Tok::Comma, start_col);
                chars.next();
                col += 1;
            }
            '=' => {
                push!(Tok::Equals, start_col);
                chars.next();
                col += 1;
            }
            '"' => {
                chars.next();
                col += 1;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => {
                            col += 1;
                            break;
                        }
                        Some('\n') | None => {
                            return Err(ParseError::Syntax {
                                line,
                                column: start_col,
                                message: "unterminated string".into(),
                            })
                        }
                        Some(c) => {
                            s.push(c);
                            col += 1;
                        }
                    }
                }
                push!(Tok::Str(s), start_col);
            }
            c if c.is_ascii_uppercase() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_uppercase() {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Letters(s), start_col);
            }
            c if c.is_ascii_lowercase() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_lowercase() || c == '_' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Word(s), start_col);
            }
            c if c.is_ascii_digit() || c == '-' || c == '.' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() || c == '.' || c == '-' || c == 'e' || c == 'E' || c == '+' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let n: f64 = s.parse().map_err(|_| ParseError::Syntax {
                    line,
                    column: start_col,
                    message: format!("bad number {s:?}"),
                })?;
                push!(Tok::Number(n), start_col);
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    column: start_col,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    out.push(Spanned { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    declared: BTreeSet<char>,
}

/// Raw argument of a constructor or constraint call.
enum Arg {
    Letters(String, u32, u32),
    Number(f64),
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos.min(self.toks.len() - 1)].clone();
        if self.pos < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax { line: t.line, column: t.column, message: message.into() }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::End => {
                self.next();
                Ok(())
            }
            _ => Err(self.err("expected end of statement")),
        }
    }

    fn point_id(&mut self) -> Result<PointId, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Letters(s) if s.len() == 1 => Ok(PointId::new(s.chars().next().unwrap()).unwrap()),
            _ => Err(ParseError::Syntax {
                line: t.line,
                column: t.column,
                message: "expected a single-letter point identifier".into(),
            }),
        }
    }

    fn args(&mut self) -> Result<Vec<Arg>, ParseError> {
        match self.next().tok {
            Tok::LParen => {}
            _ => return Err(self.err("expected '('")),
        }
        let mut args = Vec::new();
        loop {
            let t = self.next();
            match t.tok {
                Tok::Letters(s) => args.push(Arg::Letters(s, t.line, t.column)),
                Tok::Number(n) => args.push(Arg::Number(n)),
                Tok::RParen if args.is_empty() => return Ok(args),
                _ => {
                    return Err(ParseError::Syntax {
                        line: t.line,
                        column: t.column,
                        message: "expected argument".into(),
                    })
                }
            }
            let t = self.next();
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => return Ok(args),
                _ => {
                    return Err(ParseError::Syntax {
                        line: t.line,
                        column: t.column,
                        message: "expected ',' or ')'".into(),
                    })
                }
            }
        }
    }
}

fn letters_err(line: u32, column: u32, want: &str, got: &str) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: format!("expected {want}, got {got:?}"),
    }
}

fn as_point(arg: &Arg, want: &str) -> Result<PointId, ParseError> {
    match arg {
        Arg::Letters(s, l, c) => {
            if s.len() == 1 {
                Ok(PointId::new(s.chars().next().unwrap()).unwrap())
            } else {
                Err(letters_err(*l, *c, want, s))
            }
        }
        Arg::Number(_) => Err(ParseError::Syntax {
            line: 0,
            column: 0,
            message: format!("expected {want}, got a number"),
        }),
    }
}

fn as_linear(arg: &Arg) -> Result<LinearRef, ParseError> {
    match arg {
        Arg::Letters(s, l, c) => {
            if s.len() == 2 {
                let mut it = s.chars();
                Ok(LinearRef::new(
                    PointId::new(it.next().unwrap()).unwrap(),
                    PointId::new(it.next().unwrap()).unwrap(),
                ))
            } else {
                Err(letters_err(*l, *c, "a two-letter segment/line reference", s))
            }
        }
        Arg::Number(_) => Err(ParseError::Syntax {
            line: 0,
            column: 0,
            message: "expected a two-letter segment/line reference, got a number".into(),
        }),
    }
}

fn as_circle(arg: &Arg) -> Result<CircleRef, ParseError> {
    as_point(arg, "a circle center letter").map(|center| CircleRef { center })
}

fn as_angle(arg: &Arg) -> Result<AngleRef, ParseError> {
    match arg {
        Arg::Letters(s, l, c) => {
            if s.len() == 3 {
                let v: Vec<char> = s.chars().collect();
                Ok(AngleRef::new(
                    PointId::new(v[0]).unwrap(),
                    PointId::new(v[1]).unwrap(),
                    PointId::new(v[2]).unwrap(),
                ))
            } else {
                Err(letters_err(*l, *c, "a three-letter angle reference", s))
            }
        }
        Arg::Number(_) => Err(ParseError::Syntax {
            line: 0,
            column: 0,
            message: "expected a three-letter angle reference, got a number".into(),
        }),
    }
}

fn as_number(arg: &Arg, want: &str) -> Result<f64, ParseError> {
    match arg {
        Arg::Number(n) => Ok(*n),
        Arg::Letters(s, l, c) => Err(letters_err(*l, *c, want, s)),
    }
}

fn as_branch(arg: &Arg) -> Result<u8, ParseError> {
    // Out-of-range selectors are kept and reported by validation.
    let n = as_number(arg, "a branch selector")?;
    Ok(if n < 0.0 || n > 255.0 { 255 } else { n as u8 })
}

fn arity(
    name: &str,
    args: &[Arg],
    expected: usize,
    line: u32,
    column: u32,
) -> Result<(), ParseError> {
    if args.len() == expected {
        Ok(())
    } else {
        Err(ParseError::Syntax {
            line,
            column,
            message: format!("{name} takes {expected} arguments, got {}", args.len()),
        })
    }
}

fn constructor(name: &str, args: Vec<Arg>, line: u32, column: u32) -> Result<Constructor, ParseError> {
    let c = match name {
        "midpoint" => {
            arity(name, &args, 2, line, column)?;
            Constructor::Midpoint { a: as_point(&args[0], "a point")?, b: as_point(&args[1], "a point")? }
        }
        "intersection_line_line" => {
            arity(name, &args, 2, line, column)?;
            Constructor::IntersectionLineLine { l1: as_linear(&args[0])?, l2: as_linear(&args[1])? }
        }
        "intersection_line_circle" => {
            arity(name, &args, 3, line, column)?;
            Constructor::IntersectionLineCircle {
                line: as_linear(&args[0])?,
                circle: as_circle(&args[1])?,
                branch: as_branch(&args[2])?,
            }
        }
        "intersection_circle_circle" => {
            arity(name, &args, 3, line, column)?;
            Constructor::IntersectionCircleCircle {
                c1: as_circle(&args[0])?,
                c2: as_circle(&args[1])?,
                branch: as_branch(&args[2])?,
            }
        }
        "foot_of_perpendicular" => {
            arity(name, &args, 2, line, column)?;
            Constructor::FootOfPerpendicular {
                from: as_point(&args[0], "a point")?,
                onto: as_linear(&args[1])?,
            }
        }
        "tangent_point" => {
            arity(name, &args, 3, line, column)?;
            Constructor::TangentPoint {
                from: as_point(&args[0], "a point")?,
                circle: as_circle(&args[1])?,
                branch: as_branch(&args[2])?,
            }
        }
        "point_on" => {
            arity(name, &args, 2, line, column)?;
            let element = match &args[0] {
                Arg::Letters(s, ..) if s.len() == 1 => OnElement::Circle { circle: as_circle(&args[0])? },
                _ => OnElement::Linear { carrier: as_linear(&args[0])? },
            };
            Constructor::PointOn { element, t: as_number(&args[1], "a parameter")? }
        }
        "extension_point" => {
            arity(name, &args, 2, line, column)?;
            Constructor::ExtensionPoint {
                seg: as_linear(&args[0])?,
                factor: as_number(&args[1], "a factor")?,
            }
        }
        "circle_center" | "incenter" | "circumcenter" | "centroid" => {
            arity(name, &args, 3, line, column)?;
            let a = as_point(&args[0], "a point")?;
            let b = as_point(&args[1], "a point")?;
            let c = as_point(&args[2], "a point")?;
            match name {
                "circle_center" => Constructor::CircleCenter { a, b, c },
                "incenter" => Constructor::Incenter { a, b, c },
                "circumcenter" => Constructor::Circumcenter { a, b, c },
                _ => Constructor::Centroid { a, b, c },
            }
        }
        _ => {
            return Err(ParseError::UnknownConstructor { line, column, name: name.to_string() })
        }
    };
    Ok(c)
}

fn constraint(name: &str, args: Vec<Arg>, line: u32, column: u32) -> Result<Constraint, ParseError> {
    let c = match name {
        "parallel" => {
            arity(name, &args, 2, line, column)?;
            Constraint::Parallel { l1: as_linear(&args[0])?, l2: as_linear(&args[1])? }
        }
        "perpendicular" => {
            arity(name, &args, 2, line, column)?;
            Constraint::Perpendicular { l1: as_linear(&args[0])?, l2: as_linear(&args[1])? }
        }
        "tangent" => {
            arity(name, &args, 2, line, column)?;
            Constraint::Tangent { line: as_linear(&args[0])?, circle: as_circle(&args[1])? }
        }
        "on_circle" => {
            arity(name, &args, 2, line, column)?;
            Constraint::OnCircle { point: as_point(&args[0], "a point")?, circle: as_circle(&args[1])? }
        }
        "collinear" => {
            arity(name, &args, 3, line, column)?;
            Constraint::Collinear {
                a: as_point(&args[0], "a point")?,
                b: as_point(&args[1], "a point")?,
                c: as_point(&args[2], "a point")?,
            }
        }
        "equal_length" => {
            arity(name, &args, 2, line, column)?;
            Constraint::EqualLength { s1: as_linear(&args[0])?, s2: as_linear(&args[1])? }
        }
        "equal_angle" => {
            arity(name, &args, 2, line, column)?;
            Constraint::EqualAngle { a1: as_angle(&args[0])?, a2: as_angle(&args[1])? }
        }
        "angle_bisector" => {
            arity(name, &args, 2, line, column)?;
            Constraint::AngleBisector { bisector: as_linear(&args[0])?, angle: as_angle(&args[1])? }
        }
        "is_diameter" => {
            arity(name, &args, 2, line, column)?;
            Constraint::IsDiameter { seg: as_linear(&args[0])?, circle: as_circle(&args[1])? }
        }
        "is_chord" => {
            arity(name, &args, 2, line, column)?;
            Constraint::IsChord { seg: as_linear(&args[0])?, circle: as_circle(&args[1])? }
        }
        "is_inscribed_angle" => {
            arity(name, &args, 2, line, column)?;
            Constraint::IsInscribedAngle { angle: as_angle(&args[0])?, circle: as_circle(&args[1])? }
        }
        "is_central_angle" => {
            arity(name, &args, 2, line, column)?;
            Constraint::IsCentralAngle { angle: as_angle(&args[0])?, circle: as_circle(&args[1])? }
        }
        "is_parallelogram" => {
            arity(name, &args, 1, line, column)?;
            match &args[0] {
                Arg::Letters(s, l, c) if s.len() == 4 => {
                    let v: Vec<PointId> = s.chars().map(|ch| PointId::new(ch).unwrap()).collect();
                    let _ = (l, c);
                    Constraint::IsParallelogram { a: v[0], b: v[1], c: v[2], d: v[3] }
                }
                Arg::Letters(s, l, c) => {
                    return Err(letters_err(*l, *c, "a four-letter vertex list", s))
                }
                Arg::Number(_) => {
                    return Err(ParseError::Syntax {
                        line,
                        column,
                        message: "expected a four-letter vertex list".into(),
                    })
                }
            }
        }
        _ => return Err(ParseError::UnknownConstraint { line, column, name: name.to_string() }),
    };
    Ok(c)
}

/// Parse scene-language source into a [`SceneProgram`].
///
/// Declaration order equals source order. Errors carry line/column.
pub fn parse_program(name: &str, text: &str) -> Result<SceneProgram, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, declared: BTreeSet::new() };
    let mut declarations = Vec::new();
    let mut stage = 1u8;

    loop {
        if p.pos >= p.toks.len() {
            break;
        }
        // Skip empty statements.
        if matches!(p.peek().tok, Tok::End) {
            p.next();
            if p.pos >= p.toks.len() {
                break;
            }
            continue;
        }
        let head = p.next();
        let span = Span { line: head.line, column: head.column };
        let word = match &head.tok {
            Tok::Word(w) => w.clone(),
            _ => {
                return Err(ParseError::Syntax {
                    line: head.line,
                    column: head.column,
                    message: "expected a declaration keyword".into(),
                })
            }
        };
        let kind = match word.as_str() {
            "stage" => {
                let t = p.next();
                match t.tok {
                    Tok::Number(n) if n == 1.0 || n == 2.0 => stage = n as u8,
                    _ => {
                        return Err(ParseError::Syntax {
                            line: t.line,
                            column: t.column,
                            message: "stage must be 1 or 2".into(),
                        })
                    }
                }
                p.expect_end()?;
                continue;
            }
            "point" => {
                let id = p.point_id()?;
                if !p.declared.insert(id.ch()) {
                    return Err(ParseError::DuplicateIdentifier {
                        line: span.line,
                        column: span.column,
                        id: id.ch(),
                    });
                }
                if matches!(p.peek().tok, Tok::Equals) {
                    p.next();
                    let t = p.next();
                    let (ctor_name, line, column) = match &t.tok {
                        Tok::Word(w) => (w.clone(), t.line, t.column),
                        _ => {
                            return Err(ParseError::Syntax {
                                line: t.line,
                                column: t.column,
                                message: "expected a constructor name".into(),
                            })
                        }
                    };
                    let args = p.args()?;
                    let ctor = constructor(&ctor_name, args, line, column)?;
                    DeclKind::ConstructedPoint { id, ctor }
                } else {
                    DeclKind::FreePoint { id }
                }
            }
            "segment" => DeclKind::Segment { a: p.point_id()?, b: p.point_id()? },
            "line" => DeclKind::Line { a: p.point_id()?, b: p.point_id()? },
            "ray" => DeclKind::Ray { origin: p.point_id()?, through: p.point_id()? },
            "circle" => DeclKind::Circle { center: p.point_id()?, through: p.point_id()? },
            "polygon" => {
                let mut vertices = Vec::new();
                while matches!(p.peek().tok, Tok::Letters(_)) {
                    vertices.push(p.point_id()?);
                }
                if vertices.len() < 3 {
                    return Err(ParseError::Syntax {
                        line: span.line,
                        column: span.column,
                        message: "polygon needs at least three vertices".into(),
                    });
                }
                DeclKind::Polygon { vertices }
            }
            "constraint" => {
                let t = p.next();
                let (cname, line, column) = match &t.tok {
                    Tok::Word(w) => (w.clone(), t.line, t.column),
                    _ => {
                        return Err(ParseError::Syntax {
                            line: t.line,
                            column: t.column,
                            message: "expected a constraint name".into(),
                        })
                    }
                };
                let args = p.args()?;
                DeclKind::Constraint { constraint: constraint(&cname, args, line, column)? }
            }
            "annotation" => {
                let t = p.next();
                match t.tok {
                    Tok::Str(s) => DeclKind::Annotation { text: s },
                    _ => {
                        return Err(ParseError::Syntax {
                            line: t.line,
                            column: t.column,
                            message: "expected a quoted string".into(),
                        })
                    }
                }
            }
            other => {
                return Err(ParseError::Syntax {
                    line: span.line,
                    column: span.column,
                    message: format!("unknown declaration keyword {other:?}"),
                })
            }
        };
        declarations.push(Declaration { kind, stage, span });
        p.expect_end()?;
    }

    Ok(SceneProgram { name: name.to_string(), declarations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let p = parse_program("t", "point A; point B; point M = midpoint(A,B); segment A B").unwrap();
        assert_eq!(p.declarations.len(), 4);
        assert!(matches!(
            p.declarations[2].kind,
            DeclKind::ConstructedPoint { ctor: Constructor::Midpoint { .. }, .. }
        ));
    }

    #[test]
    fn duplicate_identifier() {
        let e = parse_program("t", "point A; point A").unwrap_err();
        assert!(matches!(e, ParseError::DuplicateIdentifier { id: 'A', .. }));
    }

    #[test]
    fn unknown_constructor() {
        let e = parse_program("t", "point A; point B; point C = gizmo(A,B)").unwrap_err();
        assert!(matches!(e, ParseError::UnknownConstructor { .. }));
    }

    #[test]
    fn stage_marker_tags_declarations() {
        let p = parse_program("t", "point A\nstage 2\npoint B").unwrap();
        assert_eq!(p.declarations[0].stage, 1);
        assert_eq!(p.declarations[1].stage, 2);
    }

    #[test]
    fn comments_and_blank_lines() {
        let p = parse_program("t", "# a comment\n\npoint A # trailing\npoint B\n").unwrap();
        assert_eq!(p.declarations.len(), 2);
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_program("t", "point A;\nsegment A").unwrap_err();
        match e {
            ParseError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }
}
