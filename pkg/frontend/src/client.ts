// Thin WebSocket wrapper: JSON encode/decode plus typed message dispatch.
// Kept free of rendering or session logic so it is trivially replaceable
// by a fake in tests.

import { parseServerMsg, type ClientCmd, type ServerMsg } from "./protocol.js";

export interface SessionSocket {
  send(cmd: ClientCmd): void;
  close(): void;
}

export interface ClientHandlers {
  onMessage: (msg: ServerMsg) => void;
  onClose?: () => void;
}

export function connect(url: string, handlers: ClientHandlers): SessionSocket {
  const ws = new WebSocket(url);
  ws.onmessage = (ev: MessageEvent) => {
    if (typeof ev.data !== "string") {
      return;
    }
    const msg = parseServerMsg(ev.data);
    if (msg) {
      handlers.onMessage(msg);
    }
  };
  ws.onclose = () => handlers.onClose?.();
  return {
    send: (cmd) => ws.send(JSON.stringify(cmd)),
    close: () => ws.close(),
  };
}
