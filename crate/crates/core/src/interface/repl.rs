use std::io::{self, BufRead, IsTerminal, Write};

use crate::datastore::DataSourceType;
use crate::interpreter::{Intent, PlotSlot};
use crate::session::{Feedback, PressedKind, PressedTarget, Session, SwipeDirection};

use super::{render_feedback, StateView};

const HELP: &str = "\
Type an utterance, optionally prefixed with the element being held:
  @start, @end          start or end date label
  @plotA, @plotB        a plot on the two-range page
  @groupN               plot N (0-based) on the cyclical page
  @source[:name]        a data source label
Commands:
  :state                show the current page
  :json                 print the current page as one JSON line
  :swipe back|forward   move the range by its own length
  :undo  :dismiss  :home
  :help  :quit";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplOutput {
    pub text: String,
    pub quit: bool,
}

impl ReplOutput {
    fn text(text: impl Into<String>) -> ReplOutput {
        ReplOutput {
            text: text.into(),
            quit: false,
        }
    }
}

/// Line-oriented front end over a [`Session`].
pub struct Repl {
    session: Session,
}

impl Repl {
    pub fn new(session: Session) -> Repl {
        Repl { session }
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn process_line(&mut self, line: &str) -> ReplOutput {
        let line = line.trim();
        if line.is_empty() {
            return ReplOutput::text("");
        }
        if let Some(cmd) = line.strip_prefix(':') {
            return self.builtin(cmd);
        }
        let (target, text) = match line.strip_prefix('@') {
            Some(rest) => {
                let (head, text) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                match parse_target(head) {
                    Ok(t) => (t, text.trim()),
                    Err(e) => return ReplOutput::text(format!("error: {e}")),
                }
            }
            None => (PressedTarget::default(), line),
        };
        let fb = self.session.command(text, target);
        self.report(&fb)
    }

    fn builtin(&mut self, cmd: &str) -> ReplOutput {
        let mut words = cmd.split_whitespace();
        let fb = match (words.next().unwrap_or(""), words.next()) {
            ("quit" | "q" | "exit", None) => {
                return ReplOutput {
                    text: String::new(),
                    quit: true,
                }
            }
            ("help", None) => return ReplOutput::text(HELP),
            ("state", None) => return ReplOutput::text(StateView::of(&self.session).render_text()),
            ("json", None) => {
                let view = StateView::of(&self.session);
                return ReplOutput::text(serde_json::to_string(&view).expect("state view serializes"));
            }
            ("swipe", Some("back" | "b")) => self.session.swipe(SwipeDirection::Back),
            ("swipe", Some("forward" | "f")) => self.session.swipe(SwipeDirection::Forward),
            ("undo", None) => self.session.dispatch(Intent::Undo),
            ("dismiss", None) => self.session.dispatch(Intent::DismissQuery),
            ("home", None) => self.session.dispatch(Intent::GoHome),
            _ => return ReplOutput::text(format!("error: unknown command :{cmd} (try :help)")),
        };
        self.report(&fb)
    }

    fn report(&self, fb: &Feedback) -> ReplOutput {
        let mut text = render_feedback(fb);
        if fb.is_executed() {
            text.push('\n');
            text.push_str(StateView::of(&self.session).render_text().trim_end());
        }
        ReplOutput::text(text)
    }
}

fn parse_target(head: &str) -> Result<PressedTarget, String> {
    let target = match head {
        "start" => PressedTarget::of(PressedKind::StartDateLabel),
        "end" => PressedTarget::of(PressedKind::EndDateLabel),
        "plotA" | "plota" => PressedTarget::plot(PlotSlot::A),
        "plotB" | "plotb" => PressedTarget::plot(PlotSlot::B),
        "source" => PressedTarget::of(PressedKind::DataSourceLabel),
        _ => {
            if let Some(n) = head.strip_prefix("group") {
                let i: u8 = n.parse().map_err(|_| format!("bad group index {n:?}"))?;
                PressedTarget::plot(PlotSlot::Group(i))
            } else if let Some(name) = head.strip_prefix("source:") {
                let source: DataSourceType = name
                    .replace('_', " ")
                    .parse()
                    .map_err(|_| format!("unknown data source {name:?}"))?;
                PressedTarget {
                    source: Some(source),
                    ..PressedTarget::of(PressedKind::DataSourceLabel)
                }
            } else {
                return Err(format!("unknown element @{head}"));
            }
        }
    };
    Ok(target)
}

/// Reads lines until EOF or `:quit`. A prompt is shown only on a terminal.
pub fn run_repl(session: Session, input: impl BufRead, mut output: impl Write) -> io::Result<Session> {
    let prompt = io::stdin().is_terminal();
    let mut repl = Repl::new(session);
    if prompt {
        writeln!(output, "{}", StateView::of(&repl.session).render_text().trim_end())?;
        write!(output, "> ")?;
        output.flush()?;
    }
    for line in input.lines() {
        let out = repl.process_line(&line?);
        if out.quit {
            break;
        }
        if !out.text.is_empty() {
            writeln!(output, "{}", out.text)?;
        }
        if prompt {
            write!(output, "> ")?;
        }
        output.flush()?;
    }
    Ok(repl.session)
}
