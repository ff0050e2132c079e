import { CaltalkClient } from "./api.js";
import { ChatApp } from "./app.js";

// The API base defaults to same-origin; override with ?api=http://host:port
// when the service runs elsewhere.
const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "";
const app = new ChatApp(document.getElementById("app")!, new CaltalkClient(base));
void app.init();
