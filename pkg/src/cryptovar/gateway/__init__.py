"""HTTP/WebSocket API and operator CLI."""
