// WebSocket multiplexer: one connection, per-channel handlers, gap flags.

import type { StreamFrame } from "./types";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((event: { data: string }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => WebSocketLike;

export type FrameHandler = (frame: StreamFrame) => void;

export class StreamClient {
  private socket: WebSocketLike | null = null;
  private handlers = new Map<string, FrameHandler>();
  private pending: string[] = [];
  private open = false;
  gapsSeen = 0;

  constructor(
    private url: string,
    private factory: SocketFactory = (u) => new WebSocket(u) as unknown as WebSocketLike,
  ) {}

  connect(): void {
    this.socket = this.factory(this.url);
    this.socket.onopen = () => {
      this.open = true;
      for (const message of this.pending) this.socket?.send(message);
      this.pending = [];
    };
    this.socket.onmessage = (event) => {
      const frame = JSON.parse(event.data) as StreamFrame;
      if (frame.gap) this.gapsSeen += 1;
      this.handlers.get(frame.channel)?.(frame);
    };
    this.socket.onclose = () => {
      this.open = false;
    };
  }

  subscribe(channel: string, params: Record<string, unknown>, handler: FrameHandler): void {
    this.handlers.set(channel, handler);
    const message = JSON.stringify({ op: "subscribe", channel, params });
    if (this.open && this.socket) {
      this.socket.send(message);
    } else {
      this.pending.push(message);
    }
  }

  unsubscribeAll(): void {
    this.handlers.clear();
    if (this.open && this.socket) {
      this.socket.send(JSON.stringify({ op: "unsubscribe" }));
    }
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
    this.open = false;
  }
}
