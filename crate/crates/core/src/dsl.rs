//! Line-oriented pulse-program language (`.pseq`).
//!
//! ```text
//! program   := { line }
//! line      := [ stmt ] [ "#" any ] NEWLINE
//! stmt      := pulse | delay | zrot
//! pulse     := "pulse" angle phase [ "finite" ]
//! delay     := "delay" number unit
//! zrot      := "zrot" angle ( "composite" | "direct" )
//! angle     := base [ "/" number ]
//! base      := number [ "pi" ] | "pi" | "-pi"
//! phase     := "x" | "y" | "-x" | "-y" | angle
//! unit      := "s" | "ms" | "us"
//! ```
//!
//! The `pi` suffix is attached to the number (`0.5pi`).

use std::f64::consts::PI;
use std::fmt;

use crate::nmr::{PulseEvent, ZRotRealization, PHASE_MINUS_X, PHASE_MINUS_Y, PHASE_X, PHASE_Y};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceProgram {
    pub text: String,
    /// File path, or `"<inline>"`.
    pub origin: String,
}

impl SourceProgram {
    pub fn inline(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            origin: "<inline>".into(),
        }
    }

    pub fn from_file(path: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            origin: path.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A located message; `line` and `column` are 1-based, counted in characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    /// `origin:line:column: severity: message`
    pub fn render(&self, origin: &str) -> String {
        format!("{origin}:{}:{}: {}: {}", self.line, self.column, self.severity, self.message)
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        if ch == '#' {
            if let Some((b, c)) = start.take() {
                out.push(Token { text: &line[b..byte], column: c + 1 });
            }
            return out;
        }
        match (ch.is_whitespace(), start) {
            (true, Some((b, c))) => {
                out.push(Token { text: &line[b..byte], column: c + 1 });
                start = None;
            }
            (false, None) => start = Some((byte, col)),
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        out.push(Token { text: &line[b..], column: c + 1 });
    }
    out
}

fn parse_number(s: &str) -> Result<f64, String> {
    parse_value(s, "number")
}

fn parse_value(s: &str, what: &str) -> Result<f64, String> {
    let plausible = !s.is_empty()
        && s.chars().any(|c| c.is_ascii_digit())
        && s.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
    let value = if plausible { s.parse::<f64>().ok() } else { None };
    match value {
        Some(v) if v.is_finite() => Ok(v),
        Some(_) => Err(format!("{what} '{s}' is out of range")),
        None => Err(format!("invalid {what} '{s}'")),
    }
}

/// Parses `number`, `numberpi`, `pi`, `-pi`, optionally divided by a
/// positive number (`pi/2`, `3pi/4`), into radians.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    if let Some((num, den)) = s.split_once('/') {
        let d = parse_value(den, "angle").map_err(|_| format!("invalid angle '{s}'"))?;
        if d <= 0.0 || num.contains('/') {
            return Err(format!("invalid angle '{s}'"));
        }
        let n = parse_angle(num).map_err(|_| format!("invalid angle '{s}'"))?;
        return Ok(n / d);
    }
    match s {
        "pi" => return Ok(PI),
        "-pi" => return Ok(-PI),
        _ => {}
    }
    if let Some(num) = s.strip_suffix("pi") {
        let v = parse_value(num, "angle").map_err(|_| format!("invalid angle '{s}'"))? * PI;
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("angle '{s}' is out of range"))
        };
    }
    parse_value(s, "angle")
}

fn parse_phase(s: &str) -> Result<f64, String> {
    match s {
        "x" => Ok(PHASE_X),
        "y" => Ok(PHASE_Y),
        "-x" => Ok(PHASE_MINUS_X),
        "-y" => Ok(PHASE_MINUS_Y),
        _ => parse_angle(s).map_err(|_| format!("invalid phase '{s}' (expected x, y, -x, -y or an angle)")),
    }
}

fn unit_scale(unit: &str) -> Option<f64> {
    match unit {
        "s" => Some(1.0),
        "ms" => Some(1e3),
        "us" => Some(1e6),
        _ => None,
    }
}

struct LineParser<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    diagnostics: Vec<ParseDiagnostic>,
}

impl<'a> LineParser<'a> {
    fn error(&mut self, column: usize, message: String) {
        self.diagnostics.push(ParseDiagnostic {
            line: self.line,
            column,
            message,
            severity: Severity::Error,
        });
    }

    fn warn(&mut self, column: usize, message: String) {
        self.diagnostics.push(ParseDiagnostic {
            line: self.line,
            column,
            message,
            severity: Severity::Warning,
        });
    }

    /// Token `i`, or an error at the keyword naming what is missing.
    fn arg(&mut self, i: usize, what: &str) -> Option<(&'a str, usize)> {
        match self.tokens.get(i) {
            Some(t) => Some((t.text, t.column)),
            None => {
                let (kw, col) = (self.tokens[0].text, self.tokens[0].column);
                self.error(col, format!("'{kw}' is missing {what}"));
                None
            }
        }
    }

    fn no_extra(&mut self, from: usize) {
        if let Some(t) = self.tokens.get(from) {
            let (text, col) = (t.text, t.column);
            self.error(col, format!("unexpected token '{text}'"));
        }
    }

    fn statement(&mut self) -> Option<PulseEvent> {
        let (kw, kw_col) = (self.tokens[0].text, self.tokens[0].column);
        match kw {
            "pulse" => {
                let angle = self.arg(1, "an angle").and_then(|(t, c)| self.value(parse_angle(t), c));
                let phase = self.arg(2, "a phase").and_then(|(t, c)| self.value(parse_phase(t), c));
                let finite = match self.tokens.get(3) {
                    None => false,
                    Some(t) if t.text == "finite" => true,
                    Some(t) => {
                        let (text, col) = (t.text, t.column);
                        self.error(col, format!("expected 'finite' or end of line, found '{text}'"));
                        return None;
                    }
                };
                self.no_extra(4);
                let (angle, phase) = (angle?, phase?);
                if finite && angle < 0.0 {
                    self.error(self.tokens[1].column, "finite pulse angle must be non-negative".into());
                    return None;
                }
                Some(if finite {
                    PulseEvent::FinitePulse { angle, phase }
                } else {
                    PulseEvent::IdealPulse { angle, phase }
                })
            }
            "delay" => {
                let amount = self.arg(1, "a duration").and_then(|(t, c)| self.value(parse_number(t), c));
                let scale = self.arg(2, "a time unit (s, ms, us)").and_then(|(t, c)| {
                    let s = unit_scale(t);
                    if s.is_none() {
                        self.error(c, format!("invalid time unit '{t}' (expected s, ms or us)"));
                    }
                    s
                });
                self.no_extra(3);
                let (amount, scale) = (amount?, scale?);
                let col = self.tokens[1].column;
                if amount < 0.0 {
                    self.error(col, "delay must be non-negative".into());
                    return None;
                }
                if amount == 0.0 {
                    self.warn(col, "zero-length delay has no effect".into());
                }
                Some(PulseEvent::Delay { duration: amount / scale })
            }
            "zrot" => {
                let angle = self.arg(1, "an angle").and_then(|(t, c)| self.value(parse_angle(t), c));
                let realization = self.arg(2, "'composite' or 'direct'").and_then(|(t, c)| match t {
                    "composite" => Some(ZRotRealization::Composite),
                    "direct" => Some(ZRotRealization::Direct),
                    _ => {
                        self.error(c, format!("expected 'composite' or 'direct', found '{t}'"));
                        None
                    }
                });
                self.no_extra(3);
                Some(PulseEvent::CompositeZRot {
                    angle: angle?,
                    realization: realization?,
                })
            }
            other => {
                self.error(kw_col, format!("unknown statement '{other}' (expected pulse, delay or zrot)"));
                None
            }
        }
    }

    fn value(&mut self, r: Result<f64, String>, column: usize) -> Option<f64> {
        match r {
            Ok(v) => Some(v),
            Err(msg) => {
                self.error(column, msg);
                None
            }
        }
    }
}

/// Parses a whole program, collecting every diagnostic. Any error empties the
/// returned event list.
pub fn parse_program(src: &SourceProgram) -> (Vec<PulseEvent>, Vec<ParseDiagnostic>) {
    parse_text(&src.text)
}

fn parse_text(text: &str) -> (Vec<PulseEvent>, Vec<ParseDiagnostic>) {
    let mut events = Vec::new();
    let mut diagnostics = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let tokens = tokenize(line);
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            line: i + 1,
            tokens,
            diagnostics: Vec::new(),
        };
        let event = p.statement();
        let line_failed = p.diagnostics.iter().any(|d| d.severity == Severity::Error);
        diagnostics.append(&mut p.diagnostics);
        if let (Some(e), false) = (event, line_failed) {
            events.push(e);
        }
    }
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        events.clear();
    }
    (events, diagnostics)
}

/// Parses raw bytes; invalid UTF-8 is reported at the first offending character.
pub fn parse_bytes(bytes: &[u8]) -> (Vec<PulseEvent>, Vec<ParseDiagnostic>) {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_text(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let line = valid.matches('\n').count() + 1;
            let column = valid.rsplit('\n').next().unwrap_or("").chars().count() + 1;
            let (_, mut diagnostics) = parse_text(&String::from_utf8_lossy(bytes));
            diagnostics.insert(
                0,
                ParseDiagnostic {
                    line,
                    column,
                    message: "input is not valid UTF-8".into(),
                    severity: Severity::Error,
                },
            );
            (Vec::new(), diagnostics)
        }
    }
}

/// Shortest text that parses back to exactly `x`.
fn format_number(x: f64) -> String {
    let plain = format!("{x}");
    if plain.len() <= 24 {
        plain
    } else {
        format!("{x:e}")
    }
}

fn format_angle(v: f64) -> String {
    if v.is_finite() && v.abs() < 1e12 {
        let k = (v * 16.0 / PI).round();
        if (v - k * PI / 16.0).abs() <= 1e-12 {
            let text = match k as i64 {
                0 => "0".to_string(),
                16 => "pi".to_string(),
                k => format!("{}pi", format_number(k as f64 / 16.0)),
            };
            if parse_angle(&text).map(f64::to_bits) == Ok(v.to_bits()) {
                return text;
            }
        }
    }
    format_number(v)
}

fn format_phase(v: f64) -> String {
    let named = [(PHASE_X, "x"), (PHASE_Y, "y"), (PHASE_MINUS_X, "-x"), (PHASE_MINUS_Y, "-y")];
    for (value, name) in named {
        if v.to_bits() == value.to_bits() {
            return name.to_string();
        }
    }
    format_angle(v)
}

fn format_delay(duration: f64) -> String {
    for (unit, scale) in [("s", 1.0), ("ms", 1e3), ("us", 1e6)] {
        let n = duration * scale;
        if n >= 1.0 && (n / scale).to_bits() == duration.to_bits() {
            return format!("delay {} {unit}", format_number(n));
        }
    }
    format!("delay {} s", format_number(duration))
}

pub fn format_event(event: &PulseEvent) -> String {
    match *event {
        PulseEvent::IdealPulse { angle, phase } => format!("pulse {} {}", format_angle(angle), format_phase(phase)),
        PulseEvent::FinitePulse { angle, phase } => {
            format!("pulse {} {} finite", format_angle(angle), format_phase(phase))
        }
        PulseEvent::Delay { duration } => format_delay(duration),
        PulseEvent::CompositeZRot { angle, realization } => format!(
            "zrot {} {}",
            format_angle(angle),
            match realization {
                ZRotRealization::Composite => "composite",
                ZRotRealization::Direct => "direct",
            }
        ),
    }
}

/// Canonical text: one statement per line, single spaces, trailing newline.
pub fn format_program(events: &[PulseEvent]) -> SourceProgram {
    let mut text = String::new();
    for e in events {
        text.push_str(&format_event(e));
        text.push('\n');
    }
    SourceProgram {
        text,
        origin: "<formatted>".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn parse(s: &str) -> (Vec<PulseEvent>, Vec<ParseDiagnostic>) {
        parse_program(&SourceProgram::inline(s))
    }

    #[test]
    fn single_pulse() {
        let (ev, diags) = parse("pulse 0.5pi y");
        assert!(diags.is_empty());
        assert_eq!(ev, vec![PulseEvent::IdealPulse { angle: FRAC_PI_2, phase: FRAC_PI_2 }]);
    }

    #[test]
    fn composite_bracket_program() {
        let (ev, diags) = parse("pulse 0.5pi x\nzrot 0.25pi composite\npulse 0.5pi -x");
        assert!(diags.is_empty());
        assert_eq!(ev.len(), 3);
        assert_eq!(ev[1], PulseEvent::CompositeZRot { angle: PI / 4.0, realization: ZRotRealization::Composite });
        assert_eq!(ev[2], PulseEvent::IdealPulse { angle: FRAC_PI_2, phase: PI });
    }

    #[test]
    fn invalid_phase_is_reported() {
        let (ev, diags) = parse("pulse 0.5pi q");
        assert!(ev.is_empty());
        assert_eq!(diags.len(), 1);
        assert_eq!((diags[0].line, diags[0].column), (1, 13));
        assert!(diags[0].message.contains("'q'"));
    }

    #[test]
    fn all_errors_are_collected() {
        let src = "pulse 1 x\nbogus\ndelay 3 h\n# ok\nzrot 1 sideways extra\npulse\n";
        let (ev, diags) = parse(src);
        assert!(ev.is_empty());
        let lines: Vec<usize> = diags.iter().map(|d| d.line).collect();
        assert_eq!(lines, vec![2, 3, 5, 5, 6, 6]);
        assert_eq!(diags[0].render("prog.pseq"), "prog.pseq:2:1: error: unknown statement 'bogus' (expected pulse, delay or zrot)");
    }

    #[test]
    fn comments_units_and_variants() {
        let src = "  pulse pi 0.25pi finite # tip\r\ndelay 2.5 us\ndelay 1 s\ndelay 500 ms\nzrot -1.5 direct\n#only\n";
        let (ev, diags) = parse(src);
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(ev[0], PulseEvent::FinitePulse { angle: PI, phase: 0.25 * PI });
        assert_eq!(ev[1], PulseEvent::Delay { duration: 2.5 / 1e6 });
        assert_eq!(ev[2], PulseEvent::Delay { duration: 1.0 });
        assert_eq!(ev[3], PulseEvent::Delay { duration: 0.5 });
        assert_eq!(ev[4], PulseEvent::CompositeZRot { angle: -1.5, realization: ZRotRealization::Direct });
    }

    #[test]
    fn semantic_checks() {
        let (ev, diags) = parse("delay 0 s");
        assert_eq!(ev.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warning);
        let (ev, diags) = parse("delay -1 s");
        assert!(ev.is_empty() && diags[0].severity == Severity::Error);
        let (ev, _) = parse("pulse -0.5pi x finite");
        assert!(ev.is_empty());
        let (ev, diags) = parse("pulse 1e400 x");
        assert!(ev.is_empty() && diags[0].message.contains("out of range"));
        assert!(parse_angle("nan").is_err() && parse_angle("inf").is_err() && parse_angle("pipi").is_err());
    }

    #[test]
    fn formatting_examples() {
        assert_eq!(format_program(&[]).text, "");
        assert_eq!(format_event(&PulseEvent::Delay { duration: 0.5 }), "delay 500 ms");
        assert_eq!(format_event(&PulseEvent::IdealPulse { angle: FRAC_PI_2, phase: FRAC_PI_2 }), "pulse 0.5pi y");
        assert_eq!(
            format_event(&PulseEvent::FinitePulse { angle: PI, phase: PHASE_MINUS_Y }),
            "pulse pi -y finite"
        );
        assert_eq!(
            format_event(&PulseEvent::CompositeZRot { angle: 3.0 * PI / 16.0, realization: ZRotRealization::Direct }),
            "zrot 0.1875pi direct"
        );
        assert_eq!(format_event(&PulseEvent::IdealPulse { angle: 0.3, phase: -0.0 }), "pulse 0.3 -0");
        assert_eq!(format_event(&PulseEvent::Delay { duration: 2e-6 }), "delay 2 us");
    }

    #[test]
    fn diagnostics_point_at_real_characters() {
        let src = "pulse\tç 0.5pi\n  delay\nzrot";
        let (_, diags) = parse(src);
        let lines: Vec<&str> = src.split('\n').collect();
        for d in &diags {
            assert!(d.column >= 1 && d.column <= lines[d.line - 1].chars().count(), "{d:?}");
        }
    }

    #[test]
    fn angle_fractions() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 0.75 * PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pi/2/2").is_err());
        assert!(parse_angle("/2").is_err());
    }

    #[test]
    fn invalid_utf8_is_a_diagnostic() {
        let (ev, diags) = parse_bytes(b"pulse 1 x\nde\xFFlay 1 s");
        assert!(ev.is_empty());
        assert_eq!((diags[0].line, diags[0].column), (2, 3));
    }

    fn arb_angle() -> impl Strategy<Value = f64> {
        prop_oneof![(-64i32..64).prop_map(|k| f64::from(k) * PI / 16.0), -20.0f64..20.0]
    }

    fn arb_event() -> impl Strategy<Value = PulseEvent> {
        prop_oneof![
            (arb_angle(), arb_angle()).prop_map(|(angle, phase)| PulseEvent::IdealPulse { angle, phase }),
            (arb_angle(), prop_oneof![Just(PHASE_Y), Just(PHASE_MINUS_X), arb_angle()])
                .prop_map(|(a, phase)| PulseEvent::FinitePulse { angle: a.abs(), phase }),
            (0.0f64..2.0).prop_map(|duration| PulseEvent::Delay { duration }),
            (arb_angle(), any::<bool>()).prop_map(|(angle, c)| PulseEvent::CompositeZRot {
                angle,
                realization: if c { ZRotRealization::Composite } else { ZRotRealization::Direct },
            }),
        ]
    }

    proptest! {
        #[test]
        fn roundtrip(events in prop::collection::vec(arb_event(), 0..50)) {
            let text = format_program(&events);
            let (back, diags) = parse_program(&text);
            prop_assert!(diags.iter().all(|d| d.severity == Severity::Warning));
            prop_assert_eq!(&back, &events);
            prop_assert_eq!(format_program(&back).text, text.text);
        }

        #[test]
        fn parser_is_total(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
            let (ev, diags) = parse_bytes(&bytes);
            if diags.iter().any(|d| d.severity == Severity::Error) {
                prop_assert!(ev.is_empty());
            }
        }
    }
}
