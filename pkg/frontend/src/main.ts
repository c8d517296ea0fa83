import { ApiClient } from "./api";
import { App } from "./app";

window.addEventListener("DOMContentLoaded", () => {
    const root = document.getElementById("app")!;
    void new App(root, new ApiClient()).init();
});
