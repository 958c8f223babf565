use std::cell::RefCell;
use std::future::Future;
use std::pin::Pin;
use std::rc::Rc;
use std::task::{Context, Poll, Waker};

use super::rng::{draw_uniform, ProcessorRng};
use super::round::MemoryOp;
use super::{Addr, Word};

/// What a processor asks of the engine after a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action<T> {
    /// Perform one memory operation this round.
    Op(MemoryOp),
    /// Perform no operation for this many rounds (at least one).
    Idle(u64),
    /// Obtain the base address of a fresh zeroed region of this many cells.
    /// Costs no round; the base arrives as the input of the next step.
    Allocate(u64),
    /// Stop, producing the processor's final private output.
    Halt(T),
}

/// Code run by one anonymous processor.
///
/// `step` receives the result of the processor's previous read or allocation
/// (if that was its last action) and its private random stream. It never
/// learns the processor's index.
pub trait ProcessorProgram {
    type Output;

    fn step(&mut self, input: Option<Word>, rng: &mut ProcessorRng) -> Action<Self::Output>;
}

enum Request {
    Op(MemoryOp),
    Idle(u64),
    Allocate(u64),
}

struct Channel {
    request: Option<Request>,
    input: Option<Word>,
    rng: ProcessorRng,
}

/// Handle through which `async` processor code talks to the PRAM.
///
/// Every awaited memory operation takes exactly one round, `idle(k)` takes
/// `k` rounds, and everything between awaits is private computation that
/// costs nothing.
#[derive(Clone)]
pub struct Processor {
    chan: Rc<RefCell<Channel>>,
}

struct Suspend<'a> {
    chan: &'a RefCell<Channel>,
    request: Option<Request>,
}

impl Future for Suspend<'_> {
    type Output = Option<Word>;

    fn poll(mut self: Pin<&mut Self>, _cx: &mut Context<'_>) -> Poll<Option<Word>> {
        match self.request.take() {
            Some(request) => {
                self.chan.borrow_mut().request = Some(request);
                Poll::Pending
            }
            None => Poll::Ready(self.chan.borrow_mut().input.take()),
        }
    }
}

impl Processor {
    fn suspend(&self, request: Request) -> Suspend<'_> {
        Suspend {
            chan: &self.chan,
            request: Some(request),
        }
    }

    pub async fn read(&self, addr: Addr) -> Word {
        self.suspend(Request::Op(MemoryOp::Read(addr)))
            .await
            .expect("engine delivers the value of every read")
    }

    pub async fn read_u64(&self, addr: Addr) -> u64 {
        self.read(addr).await.as_u64()
    }

    pub async fn write(&self, addr: Addr, value: impl Into<Word>) {
        self.suspend(Request::Op(MemoryOp::Write(addr, value.into()))).await;
    }

    pub async fn idle(&self, rounds: u64) {
        if rounds > 0 {
            self.suspend(Request::Idle(rounds)).await;
        }
    }

    pub async fn allocate(&self, size: u64) -> Addr {
        self.suspend(Request::Allocate(size))
            .await
            .expect("engine delivers the base of every allocation")
            .as_u64()
    }

    /// Uniform value in `[1, m]`.
    pub fn draw_word(&self, m: Word) -> Word {
        draw_uniform(&mut self.chan.borrow_mut().rng, m).value
    }

    /// Uniform value in `[1, m]`.
    pub fn draw(&self, m: u64) -> u64 {
        self.draw_word(Word::from(m)).as_u64()
    }

    /// A fair coin flip (one bit).
    pub fn coin(&self) -> bool {
        self.chan.borrow_mut().rng.coin()
    }
}

/// Adapts an `async` body over a [`Processor`] into a [`ProcessorProgram`].
pub struct Coroutine<T> {
    chan: Rc<RefCell<Channel>>,
    body: Pin<Box<dyn Future<Output = T>>>,
}

impl<T> Coroutine<T> {
    pub fn new<F, Fut>(body: F) -> Self
    where
        F: FnOnce(Processor) -> Fut,
        Fut: Future<Output = T> + 'static,
    {
        let chan = Rc::new(RefCell::new(Channel {
            request: None,
            input: None,
            // placeholder; the engine's stream is swapped in for each step
            rng: ProcessorRng::seeded(0),
        }));
        let body = Box::pin(body(Processor { chan: chan.clone() }));
        Coroutine { chan, body }
    }
}

impl<T> ProcessorProgram for Coroutine<T> {
    type Output = T;

    fn step(&mut self, input: Option<Word>, rng: &mut ProcessorRng) -> Action<T> {
        {
            let mut chan = self.chan.borrow_mut();
            chan.input = input;
            std::mem::swap(&mut chan.rng, rng);
        }
        let polled = self.body.as_mut().poll(&mut Context::from_waker(Waker::noop()));
        let mut chan = self.chan.borrow_mut();
        std::mem::swap(&mut chan.rng, rng);
        match polled {
            Poll::Ready(out) => Action::Halt(out),
            Poll::Pending => match chan.request.take() {
                Some(Request::Op(op)) => Action::Op(op),
                Some(Request::Idle(k)) => Action::Idle(k),
                Some(Request::Allocate(size)) => Action::Allocate(size),
                None => panic!("processor code awaited something other than a PRAM operation"),
            },
        }
    }
}
