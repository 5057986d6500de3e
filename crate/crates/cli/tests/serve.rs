mod common;

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Stdio};
use std::time::Duration;

use common::{model, p};
use serde_json::Value;

struct Server {
    child: Child,
    addr: String,
}

impl Server {
    fn start() -> Server {
        let mut child = Command::new(env!("CARGO_BIN_EXE_daia"))
            .args(["serve", "--model", p(model()), "--port", "0", "--fps", "100", "--seed", "5"])
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
        let addr = line.trim().strip_prefix("listening on ").unwrap_or_else(|| panic!("{line}")).to_string();
        Server { child, addr }
    }

    fn connect(&self) -> Client {
        let stream = TcpStream::connect(&self.addr).unwrap();
        stream.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
        Client {
            reader: BufReader::new(stream.try_clone().unwrap()),
            stream,
        }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

struct Client {
    stream: TcpStream,
    reader: BufReader<TcpStream>,
}

impl Client {
    fn send(&mut self, msg: &str) {
        self.stream.write_all(msg.as_bytes()).unwrap();
        self.stream.write_all(b"\n").unwrap();
    }

    fn next(&mut self) -> Value {
        let mut line = String::new();
        self.reader.read_line(&mut line).unwrap();
        serde_json::from_str(&line).unwrap_or_else(|e| panic!("{e}: {line:?}"))
    }

    /// Next per-frame update, skipping nothing.
    fn update(&mut self) -> Value {
        let v = self.next();
        assert!(v.get("i").is_some(), "expected an update, got {v}");
        v
    }

    /// Reads updates until `state`, returning them all.
    fn until_state(&mut self, state: &str, limit: usize) -> Vec<Value> {
        let mut seen = Vec::new();
        while seen.len() < limit {
            let u = self.update();
            let done = u["state"] == state;
            seen.push(u);
            if done {
                break;
            }
        }
        seen
    }
}

const RAISE: &str = r#"{"type":"gesture","name":"raise_right_hand","frames":15,"speed":40}"#;
const GESTURE_FRAMES: u64 = 15;
const ACTION_WINDOW: u64 = 5;

#[test]
fn raise_reaches_action_with_relabel() {
    let server = Server::start();
    let mut c = server.connect();
    let settle = c.until_state("A", 20);
    let last = settle.last().unwrap();
    assert_eq!(last["state"], "A");
    assert_eq!(last["g"].as_str().unwrap().len(), 37);
    let before = last["i"].as_u64().unwrap();

    c.send(RAISE);
    let seen = c.until_state("X", 200);
    let hit = seen.last().unwrap();
    assert_eq!(hit["state"], "X", "never reached Action");
    let took = hit["i"].as_u64().unwrap() - before;
    assert!(took <= GESTURE_FRAMES + ACTION_WINDOW, "Action after {took} frames");
    let relabel = hit["relabel"].as_array().expect("relabel span on entering Action");
    assert!(relabel[0].as_u64().unwrap() <= relabel[1].as_u64().unwrap());
    assert!(seen.iter().any(|u| u["speed_r"].as_f64().unwrap() > 10.0));
}

#[test]
fn malformed_message_gets_error_and_session_survives() {
    let server = Server::start();
    let mut c = server.connect();
    let first = c.update()["i"].as_u64().unwrap();
    c.send("{\"type\":\"gesture\",\"name\":");
    let mut error = None;
    for _ in 0..50 {
        let v = c.next();
        if v["type"] == "error" {
            error = Some(v);
            break;
        }
    }
    let error = error.expect("error reply");
    assert!(!error["message"].as_str().unwrap().is_empty());

    let after = c.update()["i"].as_u64().unwrap();
    assert!(after > first);
    c.send(RAISE);
    assert_eq!(c.until_state("X", 200).last().unwrap()["state"], "X");

    c.send(r#"{"type":"reset"}"#);
    let back = c.until_state("A", 50);
    assert_eq!(back.last().unwrap()["state"], "A");
}

#[test]
fn concurrent_clients_are_isolated() {
    let server = Server::start();
    let mut a = server.connect();
    let mut b = server.connect();
    assert_eq!(a.update()["i"], 0);
    assert_eq!(b.update()["i"], 0);
    a.send(RAISE);
    let seen = a.until_state("X", 200);
    assert_eq!(seen.last().unwrap()["state"], "X");
    for _ in 0..seen.len() + 10 {
        let u = b.update();
        assert_eq!(u["state"], "A", "idle client moved: {u}");
        assert!(u["speed_r"].as_f64().unwrap() < 10.0);
    }
}
